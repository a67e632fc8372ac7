//! Classical baselines and reset controllers.
//!
//! Every controller maps a state to a motor voltage. [`Controller::act`]
//! takes an observation, shifts the arm angle by the Follow target when one
//! is present (so the balance laws regulate `theta - target`), and saturates
//! the output to the controller's voltage limit.

mod care;
mod dampen;
mod energy;
mod hybrid;
mod pd;
mod reset;
mod simple;

pub use care::{solve_care, LqrGain};
pub use dampen::DampenController;
pub use energy::EnergySwingUp;
pub use hybrid::{BalanceLaw, HybridController};
pub use pd::{LinearFeedback, LqrController, PdController};
pub use reset::{down_converged, reset_to_down, reset_to_upright, upright_converged};
pub use simple::{RandomController, ZeroController};

use crate::config::{fmt_real, parse_int, parse_real, KeyValue};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{Action, Observation, PendulumState, PhysicalParams};

/// A state-feedback policy producing motor voltages.
pub trait Controller<T: Real>: Send {
    fn name(&self) -> &'static str;

    /// The control law on a (target-relative) state. May exceed the limit;
    /// [`Controller::act`] saturates it.
    fn control(&mut self, state: &PendulumState<T>) -> T;

    /// Output saturation in volts.
    fn limit(&self) -> T;

    /// Clears internal state at the start of an episode.
    fn reset(&mut self) {}

    /// Saturated action for a state.
    fn act_state(&mut self, state: &PendulumState<T>) -> Action<T> {
        let v = self.control(state);
        Action::clamped(v, self.limit())
    }

    /// Saturated action for an observation; Follow targets shift the arm angle.
    fn act(&mut self, obs: &Observation<T>) -> Action<T> {
        let mut state = obs.state();
        if let Some(target) = obs.target() {
            state.theta = state.theta - target;
        }
        self.act_state(&state)
    }
}

/// `sign` with `sign(0) = 0`.
#[inline]
pub(crate) fn sign0<T: Real>(x: T) -> T {
    if x > T::zero() {
        T::one()
    } else if x < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

/// Gains and thresholds for every built-in controller.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControllerConfig<T> {
    /// PD law `V = k_theta theta + k_alpha alpha + k_theta_dot theta_dot + k_alpha_dot alpha_dot`.
    pub pd_k_theta: T,
    pub pd_k_alpha: T,
    pub pd_k_theta_dot: T,
    pub pd_k_alpha_dot: T,
    /// LQR weights `Q = diag(q_theta, q_alpha, q_theta_dot, q_alpha_dot)`, `R = r`.
    pub lqr_q_theta: T,
    pub lqr_q_alpha: T,
    pub lqr_q_theta_dot: T,
    pub lqr_q_alpha_dot: T,
    pub lqr_r: T,
    /// Energy pumping gain in V/J.
    pub energy_gain: T,
    /// Energy set point as a multiple of the upright rest energy.
    pub energy_target_ratio: T,
    /// Voltage applied when the pendulum is momentarily still.
    pub energy_kick: T,
    /// Arm centering terms added to the pumping law.
    pub energy_arm_kp: T,
    pub energy_arm_kd: T,
    /// Hybrid switches to balance below `hybrid_enter` and back to swing-up above `hybrid_exit`.
    pub hybrid_enter: T,
    pub hybrid_exit: T,
    pub hybrid_balance: BalanceLaw,
    /// Dampen law `V = -kd theta_dot - kp theta - g E sign(alpha_dot cos alpha)`.
    pub dampen_kd: T,
    pub dampen_kp: T,
    pub dampen_energy_gain: T,
    /// Arm centering used by the down reset only.
    pub reset_down_kp: T,
    pub reset_down_timeout: T,
    pub reset_upright_timeout: T,
    /// Consecutive converged reads a reset waits for before handing over.
    /// Quantized encoders report exactly zero velocity between count
    /// changes, so a single converged read can hide slow drift.
    pub reset_hold_steps: usize,
}

impl<T: Real> Default for ControllerConfig<T> {
    fn default() -> Self {
        Self {
            pd_k_theta: T::lit(4.231),
            pd_k_alpha: T::lit(-34.19),
            pd_k_theta_dot: T::lit(1.771),
            pd_k_alpha_dot: T::lit(-2.831),
            lqr_q_theta: T::one(),
            lqr_q_alpha: T::one(),
            lqr_q_theta_dot: T::lit(0.1),
            lqr_q_alpha_dot: T::lit(0.1),
            lqr_r: T::one(),
            energy_gain: T::lit(1000.0),
            energy_target_ratio: T::lit(1.3),
            energy_kick: T::lit(0.5),
            energy_arm_kp: T::lit(1.2),
            energy_arm_kd: T::lit(0.02),
            hybrid_enter: T::lit(15f64.to_radians()),
            hybrid_exit: T::lit(25f64.to_radians()),
            hybrid_balance: BalanceLaw::Lqr,
            dampen_kd: T::lit(0.1),
            dampen_kp: T::zero(),
            dampen_energy_gain: T::zero(),
            reset_down_kp: T::lit(0.3),
            reset_down_timeout: T::lit(20.0),
            reset_upright_timeout: T::lit(20.0),
            reset_hold_steps: 25,
        }
    }
}

impl<T: Real> ControllerConfig<T> {
    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::default().load_over(path)
    }

    pub fn lqr_weights(&self) -> ([[T; 4]; 4], T) {
        (
            crate::linalg::diag([
                self.lqr_q_theta,
                self.lqr_q_alpha,
                self.lqr_q_theta_dot,
                self.lqr_q_alpha_dot,
            ]),
            self.lqr_r,
        )
    }
}

impl<T: Real> KeyValue for ControllerConfig<T> {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        let slot = match key {
            "pd_k_theta" => &mut self.pd_k_theta,
            "pd_k_alpha" => &mut self.pd_k_alpha,
            "pd_k_theta_dot" => &mut self.pd_k_theta_dot,
            "pd_k_alpha_dot" => &mut self.pd_k_alpha_dot,
            "lqr_q_theta" => &mut self.lqr_q_theta,
            "lqr_q_alpha" => &mut self.lqr_q_alpha,
            "lqr_q_theta_dot" => &mut self.lqr_q_theta_dot,
            "lqr_q_alpha_dot" => &mut self.lqr_q_alpha_dot,
            "lqr_r" => &mut self.lqr_r,
            "energy_gain" => &mut self.energy_gain,
            "energy_target_ratio" => &mut self.energy_target_ratio,
            "energy_kick" => &mut self.energy_kick,
            "energy_arm_kp" => &mut self.energy_arm_kp,
            "energy_arm_kd" => &mut self.energy_arm_kd,
            "hybrid_enter" => &mut self.hybrid_enter,
            "hybrid_exit" => &mut self.hybrid_exit,
            "dampen_kd" => &mut self.dampen_kd,
            "dampen_kp" => &mut self.dampen_kp,
            "dampen_energy_gain" => &mut self.dampen_energy_gain,
            "reset_down_kp" => &mut self.reset_down_kp,
            "reset_down_timeout" => &mut self.reset_down_timeout,
            "reset_upright_timeout" => &mut self.reset_upright_timeout,
            "hybrid_balance" => {
                self.hybrid_balance = BalanceLaw::parse(value)
                    .ok_or_else(|| format!("`{value}` is not one of pd, lqr"))?;
                return Ok(true);
            }
            "reset_hold_steps" => {
                self.reset_hold_steps = parse_int(value)?;
                return Ok(true);
            }
            _ => return Ok(false),
        };
        *slot = parse_real(value)?;
        Ok(true)
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("pd_k_theta", fmt_real(self.pd_k_theta)),
            ("pd_k_alpha", fmt_real(self.pd_k_alpha)),
            ("pd_k_theta_dot", fmt_real(self.pd_k_theta_dot)),
            ("pd_k_alpha_dot", fmt_real(self.pd_k_alpha_dot)),
            ("lqr_q_theta", fmt_real(self.lqr_q_theta)),
            ("lqr_q_alpha", fmt_real(self.lqr_q_alpha)),
            ("lqr_q_theta_dot", fmt_real(self.lqr_q_theta_dot)),
            ("lqr_q_alpha_dot", fmt_real(self.lqr_q_alpha_dot)),
            ("lqr_r", fmt_real(self.lqr_r)),
            ("energy_gain", fmt_real(self.energy_gain)),
            ("energy_target_ratio", fmt_real(self.energy_target_ratio)),
            ("energy_kick", fmt_real(self.energy_kick)),
            ("energy_arm_kp", fmt_real(self.energy_arm_kp)),
            ("energy_arm_kd", fmt_real(self.energy_arm_kd)),
            ("hybrid_enter", fmt_real(self.hybrid_enter)),
            ("hybrid_exit", fmt_real(self.hybrid_exit)),
            ("hybrid_balance", self.hybrid_balance.as_str().to_string()),
            ("dampen_kd", fmt_real(self.dampen_kd)),
            ("dampen_kp", fmt_real(self.dampen_kp)),
            ("dampen_energy_gain", fmt_real(self.dampen_energy_gain)),
            ("reset_down_kp", fmt_real(self.reset_down_kp)),
            ("reset_down_timeout", fmt_real(self.reset_down_timeout)),
            ("reset_upright_timeout", fmt_real(self.reset_upright_timeout)),
            ("reset_hold_steps", self.reset_hold_steps.to_string()),
        ]
    }

    fn validate(&self) -> Result<()> {
        if !(self.lqr_r > T::zero()) {
            return Err(Error::invalid("lqr_r", "must be positive"));
        }
        for (name, q) in [
            ("lqr_q_theta", self.lqr_q_theta),
            ("lqr_q_alpha", self.lqr_q_alpha),
            ("lqr_q_theta_dot", self.lqr_q_theta_dot),
            ("lqr_q_alpha_dot", self.lqr_q_alpha_dot),
        ] {
            if q < T::zero() {
                return Err(Error::invalid(name, "LQR state weights must be non-negative"));
            }
        }
        if !(self.hybrid_enter > T::zero()) || !(self.hybrid_exit >= self.hybrid_enter) {
            return Err(Error::invalid(
                "hybrid_exit",
                "need 0 < hybrid_enter <= hybrid_exit",
            ));
        }
        for (name, v) in [
            ("energy_gain", self.energy_gain),
            ("energy_target_ratio", self.energy_target_ratio),
            ("dampen_kd", self.dampen_kd),
            ("dampen_energy_gain", self.dampen_energy_gain),
        ] {
            if v < T::zero() {
                return Err(Error::invalid(name, "must be non-negative"));
            }
        }
        if !(self.reset_down_timeout > T::zero()) || !(self.reset_upright_timeout > T::zero()) {
            return Err(Error::invalid("reset_*_timeout", "must be positive"));
        }
        Ok(())
    }
}

/// Controller selection names accepted by [`make_controller`].
pub const CONTROLLER_NAMES: [&str; 7] = ["pd", "lqr", "energy", "hybrid", "dampen", "zero", "random"];

pub fn controller_description(name: &str) -> Option<&'static str> {
    Some(match name {
        "pd" => "linear state feedback with pole-placed gains (balance)",
        "lqr" => "linear-quadratic regulator from the Riccati solution (balance)",
        "energy" => "energy-regulating swing-up with arm centering",
        "hybrid" => "energy swing-up, switching to LQR near upright with hysteresis",
        "dampen" => "arm-velocity damping that bleeds pendulum energy",
        "zero" => "always 0 V",
        "random" => "uniform random voltage within the limit",
        _ => return None,
    })
}

/// Everything needed to build a controller by name.
#[derive(Debug, Clone, Copy)]
pub struct ControllerContext<T> {
    pub params: PhysicalParams<T>,
    pub config: ControllerConfig<T>,
    pub max_voltage: T,
    /// Seed for stochastic controllers.
    pub seed: u64,
}

pub fn make_controller<T: Real>(name: &str, ctx: &ControllerContext<T>) -> Result<Box<dyn Controller<T>>> {
    let lim = ctx.max_voltage;
    Ok(match name {
        "pd" => Box::new(PdController::from_config(&ctx.config, lim)),
        "lqr" => Box::new(LqrController::design(&ctx.params, &ctx.config, lim)?),
        "energy" => Box::new(EnergySwingUp::from_config(ctx.params, &ctx.config, lim)),
        "hybrid" => Box::new(HybridController::from_config(ctx.params, &ctx.config, lim)?),
        "dampen" => Box::new(DampenController::from_config(ctx.params, &ctx.config, lim)),
        "zero" => Box::new(ZeroController::new(lim)),
        "random" => Box::new(RandomController::new(lim, ctx.seed)),
        _ => {
            return Err(Error::Usage(format!(
                "unknown controller `{name}`; valid controllers: {}",
                CONTROLLER_NAMES.join(", ")
            )))
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip() {
        let cfg = ControllerConfig::<f64>::default();
        cfg.validate().unwrap();
        assert_eq!(cfg.with_overrides(&cfg.to_kv_string(), "t").unwrap(), cfg);
        assert!(cfg.with_overrides("lqr_r = 0\n", "t").is_err());
        assert!(cfg.with_overrides("hybrid_exit = 0.1\n", "t").is_err());
        assert!(cfg.with_overrides("hybrid_balance = mpc\n", "t").is_err());
    }

    #[test]
    fn factory_knows_every_name() {
        let ctx = ControllerContext {
            params: PhysicalParams::<f64>::default(),
            config: ControllerConfig::default(),
            max_voltage: 3.0,
            seed: 1,
        };
        for name in CONTROLLER_NAMES {
            let c = make_controller(name, &ctx).unwrap();
            assert_eq!(c.name(), name);
            assert!(controller_description(name).is_some());
        }
        assert!(make_controller("mpc", &ctx).err().unwrap().is_usage());
    }

    #[test]
    fn follow_target_shifts_the_arm() {
        let mut pd = PdController::from_config(&ControllerConfig::<f64>::default(), 3.0);
        let s = PendulumState::new(0.4, 0.0, 0.0, 0.0).unwrap();
        let with_target = crate::state::make_observation(&s, Some(0.4));
        assert_eq!(pd.act(&with_target).voltage, 0.0);
    }
}
