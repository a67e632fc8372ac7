//! Reset controllers: drive a domain to an episode's initial state.

use super::dampen::DampenController;
use super::hybrid::HybridController;
use super::{Controller, ControllerConfig};
use crate::domain::{Domain, IndicatorColor};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{angle_from_down, PendulumState, PhysicalParams};

/// Hanging within 0.1 rad of straight down with both speeds below 0.1 rad/s.
pub fn down_converged<T: Real>(s: &PendulumState<T>) -> bool {
    let tol = T::lit(0.1);
    angle_from_down(s.alpha).is_ok_and(|d| d < tol) && s.theta_dot.abs() < tol && s.alpha_dot.abs() < tol
}

/// Within 0.2 rad of upright with both speeds below 0.5 rad/s.
pub fn upright_converged<T: Real>(s: &PendulumState<T>) -> bool {
    s.alpha.abs() < T::lit(0.2) && s.theta_dot.abs() < T::lit(0.5) && s.alpha_dot.abs() < T::lit(0.5)
}

/// Shared reset loop: yellow indicator, step `controller` until `done`
/// holds for `hold` consecutive reads or `timeout` seconds pass.
fn run_reset<T, D, C, F>(
    domain: &mut D,
    controller: &mut C,
    timeout: T,
    hold: usize,
    mut done: F,
) -> Result<PendulumState<T>>
where
    T: Real,
    D: Domain<T> + ?Sized,
    C: Controller<T>,
    F: FnMut(&PendulumState<T>, &C) -> bool,
{
    domain.set_indicator(IndicatorColor::Yellow);
    let start = domain.time();
    let timeout = timeout.as_f64();
    let mut streak = 0;
    loop {
        let state = match domain.read_full_state() {
            Ok(s) => s,
            Err(Error::NotReady) => {
                domain.step(T::zero())?;
                continue;
            }
            Err(e) => return Err(e),
        };
        if done(&state, controller) {
            streak += 1;
            if streak >= hold.max(1) {
                return Ok(state);
            }
        } else {
            streak = 0;
        }
        let elapsed = domain.time() - start;
        if elapsed >= timeout {
            return Err(Error::ResetFailed {
                controller: controller.name(),
                elapsed,
                final_state: state.to_array().map(|v| v.as_f64()),
            });
        }
        let v = controller.act_state(&state).voltage;
        domain.step(v)?;
    }
}

/// Runs the dampen law (plus arm centering) until the pendulum has hung at
/// rest for `reset_hold_steps` consecutive steps.
pub fn reset_to_down<T, D>(domain: &mut D, params: &PhysicalParams<T>, cfg: &ControllerConfig<T>) -> Result<PendulumState<T>>
where
    T: Real,
    D: Domain<T> + ?Sized,
{
    let mut controller = DampenController::from_config(*params, cfg, domain.config().max_voltage);
    controller.kp = cfg.reset_down_kp;
    run_reset(
        domain,
        &mut controller,
        cfg.reset_down_timeout,
        cfg.reset_hold_steps,
        |s, _| down_converged(s),
    )
}

/// Runs the hybrid swing-up until the balance branch has held the pendulum
/// near upright for `reset_hold_steps` consecutive steps.
pub fn reset_to_upright<T, D>(
    domain: &mut D,
    params: &PhysicalParams<T>,
    cfg: &ControllerConfig<T>,
) -> Result<PendulumState<T>>
where
    T: Real,
    D: Domain<T> + ?Sized,
{
    let mut controller = HybridController::from_config(*params, cfg, domain.config().max_voltage)?;
    run_reset(
        domain,
        &mut controller,
        cfg.reset_upright_timeout,
        cfg.reset_hold_steps,
        |s, c| c.balancing() && upright_converged(s),
    )
}
