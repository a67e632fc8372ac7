//! Dissipative controller that brings the pendulum to rest hanging down.

use super::{sign0, Controller, ControllerConfig};
use crate::dynamics::total_energy;
use crate::scalar::Real;
use crate::state::{PendulumState, PhysicalParams};

/// `V = -kd theta_dot - kp theta - g E sign(alpha_dot cos alpha)` while
/// `E > 0`.
///
/// With `kp = g = 0` (the defaults) the motor only ever opposes arm motion,
/// so `tau theta_dot <= 0` and the total energy cannot increase; the
/// pendulum's energy drains through the arm coupling. The removal term
/// (`g > 0`) is the swing-up law run backwards and is faster but may
/// inject arm energy transiently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampenController<T> {
    params: PhysicalParams<T>,
    pub kd: T,
    pub kp: T,
    pub energy_gain: T,
    limit: T,
}

impl<T: Real> DampenController<T> {
    pub fn from_config(params: PhysicalParams<T>, cfg: &ControllerConfig<T>, limit: T) -> Self {
        Self {
            params,
            kd: cfg.dampen_kd,
            kp: cfg.dampen_kp,
            energy_gain: cfg.dampen_energy_gain,
            limit,
        }
    }
}

impl<T: Real> Controller<T> for DampenController<T> {
    fn name(&self) -> &'static str {
        "dampen"
    }

    fn control(&mut self, state: &PendulumState<T>) -> T {
        let mut v = -self.kd * state.theta_dot - self.kp * state.theta;
        if self.energy_gain > T::zero() {
            let e = total_energy(state, &self.params);
            if e > T::zero() {
                v = v - self.energy_gain * e * sign0(state.alpha_dot * state.alpha.cos());
            }
        }
        v
    }

    fn limit(&self) -> T {
        self.limit
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_at_down_rest() {
        let cfg = ControllerConfig {
            dampen_energy_gain: 20.0,
            ..ControllerConfig::default()
        };
        let mut c = DampenController::from_config(PhysicalParams::<f64>::default(), &cfg, 3.0);
        assert_eq!(c.act_state(&PendulumState::down()).voltage, 0.0);
    }
}
