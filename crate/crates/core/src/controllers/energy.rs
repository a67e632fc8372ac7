//! Energy-regulating swing-up.

use super::{sign0, Controller, ControllerConfig};
use crate::dynamics::{total_energy, upright_energy};
use crate::scalar::Real;
use crate::state::{PendulumState, PhysicalParams};

/// Pumps energy toward `ratio * mp g Lp`:
///
/// ```text
/// V = sat(mu (E_ref - E) sign(alpha_dot cos alpha)) - kp theta - kd theta_dot
/// ```
///
/// where `sat` clips to the voltage limit before the arm terms are added.
/// Setting the target a little above the upright rest energy (ratio > 1)
/// compensates for friction and the back-EMF drag during the last swing.
/// When the pendulum is exactly still the sign term vanishes, so a fixed
/// kick voltage breaks the deadband.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergySwingUp<T> {
    params: PhysicalParams<T>,
    pub gain: T,
    pub target_energy: T,
    pub kick: T,
    pub arm_kp: T,
    pub arm_kd: T,
    limit: T,
}

impl<T: Real> EnergySwingUp<T> {
    pub fn from_config(params: PhysicalParams<T>, cfg: &ControllerConfig<T>, limit: T) -> Self {
        Self {
            target_energy: cfg.energy_target_ratio * upright_energy(&params),
            params,
            gain: cfg.energy_gain,
            kick: cfg.energy_kick,
            arm_kp: cfg.energy_arm_kp,
            arm_kd: cfg.energy_arm_kd,
            limit,
        }
    }

    /// The pumping law alone, without the arm terms.
    pub fn pumping(&self, state: &PendulumState<T>) -> T {
        let e = total_energy(state, &self.params);
        let direction = sign0(state.alpha_dot * state.alpha.cos());
        let v = self.gain * (self.target_energy - e) * direction;
        v.max(-self.limit).min(self.limit)
    }
}

impl<T: Real> Controller<T> for EnergySwingUp<T> {
    fn name(&self) -> &'static str {
        "energy"
    }

    fn control(&mut self, state: &PendulumState<T>) -> T {
        if state.alpha_dot == T::zero() {
            return self.kick;
        }
        self.pumping(state) - self.arm_kp * state.theta - self.arm_kd * state.theta_dot
    }

    fn limit(&self) -> T {
        self.limit
    }
}
