//! Device abstraction: one interface for the plant, whichever backend
//! drives it. [`SimDomain`] is the simulated backend.

mod encoder;
mod pacing;
mod sim;
mod velocity;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use encoder::{count_resolution, decode_encoder, quantize_encoder};
pub use pacing::Clock;
pub use sim::SimDomain;
pub use velocity::{estimate_velocity, filter_coefficient, FilterState};

use crate::config::{fmt_real, parse_bool, parse_int, parse_real, KeyValue};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::PendulumState;

/// Raw encoder readings at one control instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorFrame {
    pub encoder_theta: i64,
    pub encoder_alpha: i64,
    /// Seconds since the domain started.
    pub timestamp: f64,
}

/// Status LED on the device.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum IndicatorColor {
    /// A reset controller owns the actuator.
    Yellow,
    /// The last agent step earned high reward.
    Green,
    /// The last agent step earned low reward.
    Red,
}

impl IndicatorColor {
    pub fn as_str(self) -> &'static str {
        match self {
            IndicatorColor::Yellow => "yellow",
            IndicatorColor::Green => "green",
            IndicatorColor::Red => "red",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "yellow" => Some(IndicatorColor::Yellow),
            "green" => Some(IndicatorColor::Green),
            "red" => Some(IndicatorColor::Red),
            _ => None,
        }
    }

    /// Green at or above `threshold`, red below.
    pub fn for_reward<T: Real>(reward: T, threshold: T) -> Self {
        if reward >= threshold {
            IndicatorColor::Green
        } else {
            IndicatorColor::Red
        }
    }
}

impl fmt::Display for IndicatorColor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One indicator change, stamped with domain time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IndicatorEvent {
    pub time: f64,
    pub color: IndicatorColor,
}

/// Where a reset should leave the plant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResetTarget<T> {
    /// Hanging at rest, via the dampening reset controller.
    Down,
    /// Balanced upright, via the swing-up reset controller.
    Upright,
    /// Set the state directly. Simulation only.
    Arbitrary(PendulumState<T>),
}

/// Device configuration shared by every backend.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainConfig<T> {
    /// Control rate in Hz.
    pub frequency: T,
    pub encoder_counts_per_rev: u32,
    /// Commands are saturated to this magnitude before actuation.
    pub max_voltage: T,
    /// Commands beyond this magnitude are refused as a controller bug.
    pub safety_voltage: T,
    /// Pace steps to wall time instead of a virtual clock.
    pub realtime: bool,
    /// RK4 substeps per control period.
    pub integrator_substeps: usize,
    /// Cutoff of the velocity low-pass filter in Hz; 0 disables it.
    pub velocity_filter_cutoff: T,
    /// Report simulator ground truth instead of sensor estimates.
    pub oracle_state: bool,
}

impl<T: Real> DomainConfig<T> {
    pub fn dt(&self) -> T {
        T::one() / self.frequency
    }

    pub fn load(path: &std::path::Path) -> Result<Self> {
        Self::default().load_over(path)
    }
}

impl<T: Real> Default for DomainConfig<T> {
    fn default() -> Self {
        Self {
            frequency: T::lit(250.0),
            encoder_counts_per_rev: 2048,
            max_voltage: T::lit(3.0),
            safety_voltage: T::lit(18.0),
            realtime: false,
            integrator_substeps: 10,
            velocity_filter_cutoff: T::lit(50.0),
            oracle_state: false,
        }
    }
}

impl<T: Real> KeyValue for DomainConfig<T> {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        match key {
            "frequency" => self.frequency = parse_real(value)?,
            "encoder_counts_per_rev" => self.encoder_counts_per_rev = parse_int(value)?,
            "max_voltage" => self.max_voltage = parse_real(value)?,
            "safety_voltage" => self.safety_voltage = parse_real(value)?,
            "realtime" => self.realtime = parse_bool(value)?,
            "integrator_substeps" => self.integrator_substeps = parse_int(value)?,
            "velocity_filter_cutoff" => self.velocity_filter_cutoff = parse_real(value)?,
            "oracle_state" => self.oracle_state = parse_bool(value)?,
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        vec![
            ("frequency", fmt_real(self.frequency)),
            ("encoder_counts_per_rev", self.encoder_counts_per_rev.to_string()),
            ("max_voltage", fmt_real(self.max_voltage)),
            ("safety_voltage", fmt_real(self.safety_voltage)),
            ("realtime", self.realtime.to_string()),
            ("integrator_substeps", self.integrator_substeps.to_string()),
            ("velocity_filter_cutoff", fmt_real(self.velocity_filter_cutoff)),
            ("oracle_state", self.oracle_state.to_string()),
        ]
    }

    fn validate(&self) -> Result<()> {
        if !(self.frequency > T::zero()) {
            return Err(Error::invalid("frequency", "must be positive"));
        }
        if self.encoder_counts_per_rev < 4 {
            return Err(Error::invalid("encoder_counts_per_rev", "must be at least 4"));
        }
        if !(self.max_voltage > T::zero()) {
            return Err(Error::invalid("max_voltage", "must be positive"));
        }
        if self.max_voltage > self.safety_voltage {
            return Err(Error::invalid(
                "max_voltage",
                "must not exceed safety_voltage",
            ));
        }
        if self.integrator_substeps == 0 {
            return Err(Error::invalid("integrator_substeps", "must be at least 1"));
        }
        if self.velocity_filter_cutoff < T::zero() {
            return Err(Error::invalid("velocity_filter_cutoff", "must be non-negative"));
        }
        Ok(())
    }
}

/// The device interface. One caller drives an instance at a time; an
/// instance may move between threads between calls.
pub trait Domain<T: Real>: Send {
    /// Drives the plant to `target` and returns the first frame afterwards.
    /// The indicator is yellow for the whole reset.
    fn reset(&mut self, target: ResetTarget<T>) -> Result<SensorFrame>;

    /// Applies `voltage` for one control period.
    fn step(&mut self, voltage: T) -> Result<SensorFrame>;

    /// Decoded angles and estimated velocities (or ground truth when the
    /// `oracle_state` flag is on).
    fn read_full_state(&self) -> Result<PendulumState<T>>;

    fn set_indicator(&mut self, color: IndicatorColor);

    fn indicator(&self) -> IndicatorColor;

    /// Every indicator change since the domain started.
    fn indicator_log(&self) -> &[IndicatorEvent];

    fn config(&self) -> &DomainConfig<T>;

    /// Voltage that actually reached the motor on the last step.
    fn last_actuated(&self) -> T;

    /// Most recent frame.
    fn last_frame(&self) -> SensorFrame;

    /// Realtime deadline misses so far.
    fn overruns(&self) -> u64;

    /// Domain time in seconds.
    fn time(&self) -> f64;

    /// Simulator ground truth; `None` on backends that have none.
    fn ground_truth(&self) -> Option<PendulumState<T>>;

    /// Releases the device. Further steps fail.
    fn close(&mut self);
}

/// Formats the text render line shared by every backend.
pub fn render_line<T: Real>(
    time: f64,
    state: &PendulumState<T>,
    voltage: T,
    reward: T,
    led: &str,
) -> String {
    format!(
        "t={:.4} theta={:.6} alpha={:.6} V={:.4} r={:.6} led={}",
        time,
        state.theta.as_f64(),
        state.alpha.as_f64(),
        voltage.as_f64(),
        reward.as_f64(),
        led
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trip_and_invariants() {
        let cfg = DomainConfig::<f64>::default();
        let text = cfg.to_kv_string();
        assert_eq!(cfg.with_overrides(&text, "t").unwrap(), cfg);
        assert!(cfg.with_overrides("max_voltage = 20\n", "t").is_err());
        assert!(cfg.with_overrides("encoder_counts_per_rev = 2\n", "t").is_err());
        assert!(cfg.with_overrides("frequency = 0\n", "t").is_err());
        assert!(cfg.with_overrides("bogus = 1\n", "t").is_err());
    }

    #[test]
    fn indicator_threshold_rule() {
        assert_eq!(IndicatorColor::for_reward(0.95, 0.8), IndicatorColor::Green);
        assert_eq!(IndicatorColor::for_reward(0.1, 0.8), IndicatorColor::Red);
        assert_eq!(IndicatorColor::for_reward(0.8, 0.8), IndicatorColor::Green);
    }
}
