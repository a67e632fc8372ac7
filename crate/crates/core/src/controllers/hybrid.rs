//! Swing-up with a hand-over to a balance law near upright.

use super::energy::EnergySwingUp;
use super::pd::{LinearFeedback, LqrController, PdController};
use super::{Controller, ControllerConfig};
use crate::error::Result;
use crate::scalar::Real;
use crate::state::{Action, Observation, PendulumState, PhysicalParams};

/// Which linear law balances the pendulum once it is caught.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BalanceLaw {
    Pd,
    Lqr,
}

impl BalanceLaw {
    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "pd" => Some(BalanceLaw::Pd),
            "lqr" => Some(BalanceLaw::Lqr),
            _ => None,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            BalanceLaw::Pd => "pd",
            BalanceLaw::Lqr => "lqr",
        }
    }
}

/// Energy swing-up far from upright, linear balance near it. The balance
/// branch engages when `|alpha| < enter` and releases when `|alpha| > exit`;
/// the gap between the two thresholds prevents chattering at the boundary.
///
/// A Follow target only shifts the balance branch: the swing-up keeps the
/// arm centred on its physical zero, because pumping around an offset arm
/// angle drives the arm past its travel limit.
#[derive(Debug, Clone, PartialEq)]
pub struct HybridController<T> {
    pub swing: EnergySwingUp<T>,
    pub balance: LinearFeedback<T>,
    pub enter: T,
    pub exit: T,
    balancing: bool,
    switches: usize,
    limit: T,
    target: T,
}

impl<T: Real> HybridController<T> {
    pub fn from_config(params: PhysicalParams<T>, cfg: &ControllerConfig<T>, limit: T) -> Result<Self> {
        let balance = match cfg.hybrid_balance {
            BalanceLaw::Pd => PdController::from_config(cfg, limit).law,
            BalanceLaw::Lqr => LqrController::design(&params, cfg, limit)?.feedback(),
        };
        Ok(Self {
            swing: EnergySwingUp::from_config(params, cfg, limit),
            balance,
            enter: cfg.hybrid_enter,
            exit: cfg.hybrid_exit,
            balancing: false,
            switches: 0,
            limit,
            target: T::zero(),
        })
    }

    /// True while the balance branch owns the output.
    pub fn balancing(&self) -> bool {
        self.balancing
    }

    /// Branch changes since the last reset.
    pub fn switches(&self) -> usize {
        self.switches
    }
}

impl<T: Real> Controller<T> for HybridController<T> {
    fn name(&self) -> &'static str {
        "hybrid"
    }

    fn control(&mut self, state: &PendulumState<T>) -> T {
        let a = state.alpha.abs();
        if self.balancing && a > self.exit {
            self.balancing = false;
            self.switches += 1;
        } else if !self.balancing && a < self.enter {
            self.balancing = true;
            self.switches += 1;
        }
        if self.balancing {
            let mut relative = *state;
            relative.theta = relative.theta - self.target;
            self.balance.voltage(&relative)
        } else {
            self.swing.control(state)
        }
    }

    fn limit(&self) -> T {
        self.limit
    }

    fn reset(&mut self) {
        self.balancing = false;
        self.switches = 0;
        self.target = T::zero();
    }

    fn act(&mut self, obs: &Observation<T>) -> Action<T> {
        self.target = obs.target().unwrap_or_else(T::zero);
        self.act_state(&obs.state())
    }
}
