//! Simulated device: RK4 plant, encoder quantization, velocity filter,
//! actuator saturation and safety checks.

use super::encoder::{decode_encoder, quantize_encoder};
use super::pacing::Clock;
use super::velocity::{estimate_velocity, filter_coefficient, FilterState};
use super::{Domain, DomainConfig, IndicatorColor, IndicatorEvent, ResetTarget, SensorFrame};
use crate::config::KeyValue;
use crate::controllers::{reset_to_down, reset_to_upright, ControllerConfig};
use crate::dynamics::integrate_step;
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{PendulumState, PhysicalParams};

#[derive(Debug, Clone)]
pub struct SimDomain<T> {
    params: PhysicalParams<T>,
    config: DomainConfig<T>,
    reset_config: ControllerConfig<T>,
    state: PendulumState<T>,
    frame: SensorFrame,
    previous_counts: (i64, i64),
    filters: (FilterState<T>, FilterState<T>),
    filter_coefficient: T,
    frames_seen: u64,
    clock: Clock,
    indicator: IndicatorColor,
    indicator_log: Vec<IndicatorEvent>,
    last_actuated: T,
    initialized: bool,
    closed: bool,
}

impl<T: Real> SimDomain<T> {
    /// A device hanging at rest, with one sensor frame taken at `t = 0`.
    pub fn new(
        params: PhysicalParams<T>,
        config: DomainConfig<T>,
        reset_config: ControllerConfig<T>,
    ) -> Result<Self> {
        params.validate()?;
        config.validate()?;
        reset_config.validate()?;
        let state = PendulumState::down();
        let clock = Clock::new(config.frequency.as_f64(), config.realtime);
        let counts = (
            quantize_encoder(state.theta, config.encoder_counts_per_rev),
            quantize_encoder(state.alpha, config.encoder_counts_per_rev),
        );
        Ok(Self {
            params,
            filter_coefficient: filter_coefficient(config.dt(), config.velocity_filter_cutoff),
            config,
            reset_config,
            state,
            frame: SensorFrame {
                encoder_theta: counts.0,
                encoder_alpha: counts.1,
                timestamp: 0.0,
            },
            previous_counts: counts,
            filters: (FilterState::default(), FilterState::default()),
            frames_seen: 1,
            clock,
            indicator: IndicatorColor::Red,
            indicator_log: Vec::new(),
            last_actuated: T::zero(),
            initialized: false,
            closed: false,
        })
    }

    /// Defaults everywhere: datasheet plant, 250 Hz, 2048-count encoders.
    pub fn with_defaults() -> Self {
        // the defaults are validated by the unit tests
        Self::new(
            PhysicalParams::default(),
            DomainConfig::default(),
            ControllerConfig::default(),
        )
        .expect("default configuration is valid")
    }

    pub fn params(&self) -> &PhysicalParams<T> {
        &self.params
    }

    pub fn reset_config(&self) -> &ControllerConfig<T> {
        &self.reset_config
    }

    pub fn steps_taken(&self) -> u64 {
        self.clock.ticks()
    }

    fn ensure_open(&self) -> Result<()> {
        if self.closed {
            Err(Error::Protocol("domain is closed"))
        } else {
            Ok(())
        }
    }

    fn decode(&self, counts: i64) -> T {
        decode_encoder(counts, self.config.encoder_counts_per_rev)
    }

    /// Takes a new sensor frame from the current plant state.
    fn sample(&mut self) {
        let cpr = self.config.encoder_counts_per_rev;
        let counts = (
            quantize_encoder(self.state.theta, cpr),
            quantize_encoder(self.state.alpha, cpr),
        );
        let dt = self.config.dt();
        let a = self.filter_coefficient;
        let (_, f_theta) = estimate_velocity(
            self.decode(counts.0),
            self.decode(self.previous_counts.0),
            dt,
            a,
            self.filters.0,
        );
        let (_, f_alpha) = estimate_velocity(
            self.decode(counts.1),
            self.decode(self.previous_counts.1),
            dt,
            a,
            self.filters.1,
        );
        self.filters = (f_theta, f_alpha);
        self.previous_counts = counts;
        self.frame = SensorFrame {
            encoder_theta: counts.0,
            encoder_alpha: counts.1,
            timestamp: self.clock.now(),
        };
        self.frames_seen += 1;
    }

    /// Places the plant at `state` as if it had been there, at that
    /// velocity, for the previous frame as well: the estimator is primed
    /// with the true velocities so the state is readable immediately.
    fn place(&mut self, state: PendulumState<T>) -> Result<()> {
        let state = PendulumState::new(state.theta, state.alpha, state.theta_dot, state.alpha_dot)?;
        let cpr = self.config.encoder_counts_per_rev;
        self.state = state;
        let counts = (
            quantize_encoder(state.theta, cpr),
            quantize_encoder(state.alpha, cpr),
        );
        self.previous_counts = counts;
        self.filters = (
            FilterState::new(state.theta_dot),
            FilterState::new(state.alpha_dot),
        );
        self.frame = SensorFrame {
            encoder_theta: counts.0,
            encoder_alpha: counts.1,
            timestamp: self.clock.now(),
        };
        self.frames_seen = self.frames_seen.max(2);
        self.clock.resync();
        Ok(())
    }
}

impl<T: Real> Domain<T> for SimDomain<T> {
    fn reset(&mut self, target: ResetTarget<T>) -> Result<SensorFrame> {
        self.ensure_open()?;
        self.initialized = true;
        self.set_indicator(IndicatorColor::Yellow);
        let cfg = self.reset_config;
        let params = self.params;
        match target {
            ResetTarget::Arbitrary(state) => self.place(state)?,
            ResetTarget::Down => {
                reset_to_down(self, &params, &cfg)?;
            }
            ResetTarget::Upright => {
                reset_to_upright(self, &params, &cfg)?;
            }
        }
        Ok(self.frame)
    }

    fn step(&mut self, voltage: T) -> Result<SensorFrame> {
        self.ensure_open()?;
        if !self.initialized {
            return Err(Error::Protocol("domain_step called before domain_reset"));
        }
        if !voltage.is_finite() {
            self.last_actuated = T::zero();
            return Err(Error::SafetyViolation {
                commanded: voltage.as_f64(),
                reason: "non-finite command",
            });
        }
        if voltage.abs() > self.config.safety_voltage {
            self.last_actuated = T::zero();
            return Err(Error::SafetyViolation {
                commanded: voltage.as_f64(),
                reason: "command exceeds the safety voltage",
            });
        }
        let actuated = voltage.max(-self.config.max_voltage).min(self.config.max_voltage);
        let next = integrate_step(
            &self.state,
            actuated,
            self.config.dt(),
            self.config.integrator_substeps,
            &self.params,
        )?;
        self.state = next;
        self.last_actuated = actuated;
        self.clock.tick();
        self.sample();
        Ok(self.frame)
    }

    fn read_full_state(&self) -> Result<PendulumState<T>> {
        if self.frames_seen < 2 {
            return Err(Error::NotReady);
        }
        if self.config.oracle_state {
            return Ok(self.state);
        }
        Ok(PendulumState {
            theta: self.decode(self.frame.encoder_theta),
            alpha: self.decode(self.frame.encoder_alpha),
            theta_dot: self.filters.0.output,
            alpha_dot: self.filters.1.output,
        })
    }

    fn set_indicator(&mut self, color: IndicatorColor) {
        if self.indicator_log.is_empty() || self.indicator != color {
            self.indicator_log.push(IndicatorEvent {
                time: self.clock.now(),
                color,
            });
        }
        self.indicator = color;
    }

    fn indicator(&self) -> IndicatorColor {
        self.indicator
    }

    fn indicator_log(&self) -> &[IndicatorEvent] {
        &self.indicator_log
    }

    fn config(&self) -> &DomainConfig<T> {
        &self.config
    }

    fn last_actuated(&self) -> T {
        self.last_actuated
    }

    fn last_frame(&self) -> SensorFrame {
        self.frame
    }

    fn overruns(&self) -> u64 {
        self.clock.overruns()
    }

    fn time(&self) -> f64 {
        self.clock.now()
    }

    fn ground_truth(&self) -> Option<PendulumState<T>> {
        Some(self.state)
    }

    fn close(&mut self) {
        self.closed = true;
    }
}
