//! Linear state feedback about upright: hand-placed PD gains and LQR.

use super::care::{solve_care, LqrGain};
use super::{Controller, ControllerConfig};
use crate::dynamics::linearize_upright;
use crate::error::Result;
use crate::scalar::Real;
use crate::state::{PendulumState, PhysicalParams};

/// `V = g . [theta, alpha, theta_dot, alpha_dot]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinearFeedback<T> {
    pub gains: [T; 4],
}

impl<T: Real> LinearFeedback<T> {
    pub fn voltage(&self, s: &PendulumState<T>) -> T {
        let x = s.to_array();
        (0..4).fold(T::zero(), |acc, i| acc + self.gains[i] * x[i])
    }
}

/// Balance controller with fixed gains. The defaults place the poles of the
/// linearized plant at -6, -8, -20 and -25 rad/s.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PdController<T> {
    pub law: LinearFeedback<T>,
    limit: T,
}

impl<T: Real> PdController<T> {
    pub fn new(gains: [T; 4], limit: T) -> Self {
        Self {
            law: LinearFeedback { gains },
            limit,
        }
    }

    pub fn from_config(cfg: &ControllerConfig<T>, limit: T) -> Self {
        Self::new(
            [
                cfg.pd_k_theta,
                cfg.pd_k_alpha,
                cfg.pd_k_theta_dot,
                cfg.pd_k_alpha_dot,
            ],
            limit,
        )
    }
}

impl<T: Real> Controller<T> for PdController<T> {
    fn name(&self) -> &'static str {
        "pd"
    }

    fn control(&mut self, state: &PendulumState<T>) -> T {
        self.law.voltage(state)
    }

    fn limit(&self) -> T {
        self.limit
    }
}

/// Balance controller `V = -K x` with `K` from the CARE on the upright
/// linearization.
#[derive(Debug, Clone, PartialEq)]
pub struct LqrController<T> {
    pub gain: LqrGain<T, 4>,
    law: LinearFeedback<T>,
    limit: T,
}

impl<T: Real> LqrController<T> {
    pub fn design(params: &PhysicalParams<T>, cfg: &ControllerConfig<T>, limit: T) -> Result<Self> {
        let model = linearize_upright(params)?;
        let (q, r) = cfg.lqr_weights();
        let gain = solve_care(&model.a_matrix, &model.b_matrix, &q, r)?;
        Ok(Self::from_gain(gain, limit))
    }

    pub fn from_gain(gain: LqrGain<T, 4>, limit: T) -> Self {
        let gains = gain.k.map(|k| -k);
        Self {
            gain,
            law: LinearFeedback { gains },
            limit,
        }
    }

    pub fn feedback(&self) -> LinearFeedback<T> {
        self.law
    }
}

impl<T: Real> Controller<T> for LqrController<T> {
    fn name(&self) -> &'static str {
        "lqr"
    }

    fn control(&mut self, state: &PendulumState<T>) -> T {
        self.law.voltage(state)
    }

    fn limit(&self) -> T {
        self.limit
    }
}
