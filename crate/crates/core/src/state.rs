//! Plant state, actions, observations and physical constants.
//!
//! Angle conventions: `alpha` is the pendulum angle measured from upright
//! and `theta` is the arm angle measured from the front-center position.
//! Both are kept in `(-pi, pi]`; `+pi` is representable, `-pi` is not.

use serde::{Deserialize, Serialize};

use crate::config::{fmt_real, parse_real, KeyValue};
use crate::error::{Error, Result};
use crate::scalar::Real;

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap_angle<T: Real>(raw: T) -> Result<T> {
    if !raw.is_finite() {
        return Err(Error::NonFinite {
            what: "angle",
            value: raw.as_f64(),
        });
    }
    Ok(wrap_finite(raw))
}

/// Infallible form of [`wrap_angle`] for values already known to be finite.
#[inline]
pub(crate) fn wrap_finite<T: Real>(raw: T) -> T {
    let pi = T::PI();
    if raw > -pi && raw <= pi {
        return raw;
    }
    let two_pi = pi + pi;
    let mut r = raw - two_pi * ((raw + pi) / two_pi).floor();
    // r is in [-pi, pi) up to rounding; anything above pi is rounding error
    if r <= -pi {
        r = r + two_pi;
    }
    r.min(pi)
}

/// Shortest signed angular distance from `from` to `to`, in `(-pi, pi]`.
#[inline]
pub fn angle_delta<T: Real>(to: T, from: T) -> T {
    wrap_finite(to - from)
}

/// Distance of the pendulum from hanging straight down: `pi - |alpha|`.
pub fn angle_from_down<T: Real>(alpha: T) -> Result<T> {
    let pi = T::PI();
    if !alpha.is_finite() || alpha <= -pi || alpha > pi {
        return Err(Error::OutOfRange {
            what: "alpha",
            value: alpha.as_f64(),
        });
    }
    Ok(pi - alpha.abs())
}

/// Ground-truth continuous plant state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PendulumState<T> {
    pub theta: T,
    pub alpha: T,
    pub theta_dot: T,
    pub alpha_dot: T,
}

impl<T: Real> PendulumState<T> {
    /// Validates finiteness and wraps both angles.
    pub fn new(theta: T, alpha: T, theta_dot: T, alpha_dot: T) -> Result<Self> {
        for (what, v) in [
            ("theta", theta),
            ("alpha", alpha),
            ("theta_dot", theta_dot),
            ("alpha_dot", alpha_dot),
        ] {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    what,
                    value: v.as_f64(),
                });
            }
        }
        Ok(Self {
            theta: wrap_finite(theta),
            alpha: wrap_finite(alpha),
            theta_dot,
            alpha_dot,
        })
    }

    pub fn from_array(x: [T; 4]) -> Result<Self> {
        Self::new(x[0], x[1], x[2], x[3])
    }

    pub fn to_array(&self) -> [T; 4] {
        [self.theta, self.alpha, self.theta_dot, self.alpha_dot]
    }

    /// Hanging straight down, at rest.
    pub fn down() -> Self {
        Self {
            theta: T::zero(),
            alpha: T::PI(),
            theta_dot: T::zero(),
            alpha_dot: T::zero(),
        }
    }

    /// Balanced upright, at rest.
    pub fn upright() -> Self {
        Self {
            theta: T::zero(),
            alpha: T::zero(),
            theta_dot: T::zero(),
            alpha_dot: T::zero(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.to_array().iter().all(|v| v.is_finite())
    }

    pub fn cast<U: Real>(&self) -> PendulumState<U> {
        PendulumState {
            theta: U::lit(self.theta.as_f64()),
            alpha: U::lit(self.alpha.as_f64()),
            theta_dot: U::lit(self.theta_dot.as_f64()),
            alpha_dot: U::lit(self.alpha_dot.as_f64()),
        }
    }
}

/// Voltage applied to the arm motor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Action<T> {
    pub voltage: T,
}

impl<T: Real> Action<T> {
    pub fn new(voltage: T) -> Self {
        Self { voltage }
    }

    /// Saturates to `[-limit, limit]`; non-finite commands become zero.
    pub fn clamped(voltage: T, limit: T) -> Self {
        let voltage = if voltage.is_finite() {
            voltage.max(-limit).min(limit)
        } else {
            T::zero()
        };
        Self { voltage }
    }
}

/// What the agent sees: `[theta, alpha, theta_dot, alpha_dot]`, plus
/// `theta_target` appended for the Follow tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Observation<T> {
    values: Vec<T>,
}

impl<T: Real> Observation<T> {
    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn target(&self) -> Option<T> {
        self.values.get(4).copied()
    }

    /// The four plant components as a state.
    pub fn state(&self) -> PendulumState<T> {
        PendulumState {
            theta: self.values[0],
            alpha: self.values[1],
            theta_dot: self.values[2],
            alpha_dot: self.values[3],
        }
    }

    pub fn into_vec(self) -> Vec<T> {
        self.values
    }
}

/// Packs a state (and optional arm target) into an observation.
pub fn make_observation<T: Real>(state: &PendulumState<T>, target: Option<T>) -> Observation<T> {
    let mut values = Vec::with_capacity(5);
    values.push(wrap_finite(state.theta));
    values.push(wrap_finite(state.alpha));
    values.push(state.theta_dot);
    values.push(state.alpha_dot);
    if let Some(t) = target {
        values.push(wrap_finite(t));
    }
    Observation { values }
}

/// Plant and motor constants of the simulated device.
///
/// The defaults are the manufacturer datasheet values for the Qube-Servo 2
/// rotary pendulum module; inertias use the thin-rod formula `m L^2 / 12`.
/// `arm_inertia` is the arm's inertia about the motor shaft and
/// `pendulum_inertia_cm` the pendulum's inertia about its center of mass.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysicalParams<T> {
    /// Ohms.
    pub motor_resistance: T,
    /// N·m/A.
    pub torque_constant: T,
    /// V·s/rad.
    pub back_emf_constant: T,
    pub arm_mass: T,
    pub arm_length: T,
    pub arm_inertia: T,
    pub pendulum_mass: T,
    /// Full pendulum length; the center of mass is at half of it.
    pub pendulum_length: T,
    pub pendulum_inertia_cm: T,
    /// N·m·s/rad.
    pub arm_damping: T,
    /// N·m·s/rad.
    pub pendulum_damping: T,
    pub gravity: T,
}

impl<T: Real> PhysicalParams<T> {
    /// Qube-Servo 2 datasheet constants.
    pub fn qube_servo2() -> Self {
        let arm_mass = T::lit(0.095);
        let arm_length = T::lit(0.085);
        let pendulum_mass = T::lit(0.024);
        let pendulum_length = T::lit(0.129);
        let twelve = T::lit(12.0);
        Self {
            motor_resistance: T::lit(8.4),
            torque_constant: T::lit(0.042),
            back_emf_constant: T::lit(0.042),
            arm_mass,
            arm_length,
            arm_inertia: arm_mass * arm_length * arm_length / twelve,
            pendulum_mass,
            pendulum_length,
            pendulum_inertia_cm: pendulum_mass * pendulum_length * pendulum_length / twelve,
            arm_damping: T::lit(0.0005),
            pendulum_damping: T::lit(0.00005),
            gravity: T::lit(9.81),
        }
    }

    /// Same plant with all viscous damping and back-EMF removed, so the
    /// unforced system is conservative.
    pub fn lossless(&self) -> Self {
        Self {
            arm_damping: T::zero(),
            pendulum_damping: T::zero(),
            back_emf_constant: T::zero(),
            ..*self
        }
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::default().load_over(path)
    }
}

impl<T: Real> Default for PhysicalParams<T> {
    fn default() -> Self {
        Self::qube_servo2()
    }
}

impl<T: Real> KeyValue for PhysicalParams<T> {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        let slot = match key {
            "motor_resistance" => &mut self.motor_resistance,
            "torque_constant" => &mut self.torque_constant,
            "back_emf_constant" => &mut self.back_emf_constant,
            "arm_mass" => &mut self.arm_mass,
            "arm_length" => &mut self.arm_length,
            "arm_inertia" => &mut self.arm_inertia,
            "pendulum_mass" => &mut self.pendulum_mass,
            "pendulum_length" => &mut self.pendulum_length,
            "pendulum_inertia_cm" => &mut self.pendulum_inertia_cm,
            "arm_damping" => &mut self.arm_damping,
            "pendulum_damping" => &mut self.pendulum_damping,
            "gravity" => &mut self.gravity,
            _ => return Ok(false),
        };
        *slot = parse_real(value)?;
        Ok(true)
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("motor_resistance", fmt_real(self.motor_resistance)),
            ("torque_constant", fmt_real(self.torque_constant)),
            ("back_emf_constant", fmt_real(self.back_emf_constant)),
            ("arm_mass", fmt_real(self.arm_mass)),
            ("arm_length", fmt_real(self.arm_length)),
            ("arm_inertia", fmt_real(self.arm_inertia)),
            ("pendulum_mass", fmt_real(self.pendulum_mass)),
            ("pendulum_length", fmt_real(self.pendulum_length)),
            ("pendulum_inertia_cm", fmt_real(self.pendulum_inertia_cm)),
            ("arm_damping", fmt_real(self.arm_damping)),
            ("pendulum_damping", fmt_real(self.pendulum_damping)),
            ("gravity", fmt_real(self.gravity)),
        ]
    }

    fn validate(&self) -> Result<()> {
        let positive = [
            ("motor_resistance", self.motor_resistance),
            ("arm_mass", self.arm_mass),
            ("arm_length", self.arm_length),
            ("arm_inertia", self.arm_inertia),
            ("pendulum_mass", self.pendulum_mass),
            ("pendulum_length", self.pendulum_length),
            ("pendulum_inertia_cm", self.pendulum_inertia_cm),
        ];
        for (name, v) in positive {
            if !(v > T::zero()) || !v.is_finite() {
                return Err(Error::invalid(name, "must be strictly positive"));
            }
        }
        for (name, v) in [
            ("arm_damping", self.arm_damping),
            ("pendulum_damping", self.pendulum_damping),
            ("back_emf_constant", self.back_emf_constant),
            ("gravity", self.gravity),
        ] {
            if !(v >= T::zero()) || !v.is_finite() {
                return Err(Error::invalid(name, "must be finite and non-negative"));
            }
        }
        if !self.torque_constant.is_finite() || self.torque_constant == T::zero() {
            return Err(Error::invalid("torque_constant", "must be finite and nonzero"));
        }
        Ok(())
    }
}
