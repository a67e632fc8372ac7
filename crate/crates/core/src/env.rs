//! Gym-style environment: a domain plus a task, with episode accounting.

use std::collections::BTreeMap;
use std::fmt;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::config::KeyValue;
use crate::controllers::ControllerConfig;
use crate::domain::{render_line, Domain, DomainConfig, IndicatorColor, ResetTarget, SimDomain};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{make_observation, Action, Observation, PendulumState, PhysicalParams};
use crate::tasks::{dense_reward, is_terminal, InitialState, TaskEpisode, TaskKind, TaskSpec};
use crate::trajectory::{RecordSink, TrajectoryRecord};

/// Everything an environment is built from.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnvConfig<T> {
    pub task: TaskSpec<T>,
    pub domain: DomainConfig<T>,
    pub params: PhysicalParams<T>,
    /// Gains of the reset controllers.
    pub controllers: ControllerConfig<T>,
    pub seed: u64,
}

impl<T: Real> EnvConfig<T> {
    /// Default device and controllers for `task`.
    pub fn new(task: TaskSpec<T>, seed: u64) -> Self {
        Self {
            task,
            domain: DomainConfig::default(),
            params: PhysicalParams::default(),
            controllers: ControllerConfig::default(),
            seed,
        }
    }

    pub fn from_task_name(name: &str, seed: u64) -> Result<Self> {
        Ok(Self::new(TaskSpec::from_name(name)?, seed))
    }

    pub fn validate(&self) -> Result<()> {
        self.task.validate()?;
        self.domain.validate()?;
        self.params.validate()?;
        self.controllers.validate()
    }
}

/// A value in a step's info map.
#[derive(Debug, Clone, PartialEq)]
pub enum InfoValue {
    Int(i64),
    Real(f64),
    Bool(bool),
    Text(String),
    State([f64; 4]),
}

impl fmt::Display for InfoValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            InfoValue::Int(v) => write!(f, "{v}"),
            InfoValue::Real(v) => write!(f, "{v}"),
            InfoValue::Bool(v) => write!(f, "{v}"),
            InfoValue::Text(v) => f.write_str(v),
            InfoValue::State(v) => write!(f, "{v:?}"),
        }
    }
}

pub type Info = BTreeMap<&'static str, InfoValue>;

/// Outcome of one agent step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepResult<T> {
    pub observation: Observation<T>,
    pub reward: T,
    pub done: bool,
    /// Always: `step`, `time`, `indicator`, `overruns`, `voltage_commanded`,
    /// `voltage_actuated`. Follow tasks add `target`, Rotor adds
    /// `rotations`, sparse tasks add `dense_reward`, and the oracle flag adds
    /// `ground_truth`.
    pub info: Info,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RenderMode {
    /// `t=... theta=... alpha=... V=... r=... led=... task=... return=...`
    Text,
    /// One CSV row with the columns of [`RENDER_CSV_HEADER`].
    CsvFrame,
}

pub const RENDER_CSV_HEADER: &str = "t,theta,alpha,V,r,led,task,return";

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Phase {
    Fresh,
    Running,
    Done,
    Closed,
}

pub struct Env<T: Real> {
    config: EnvConfig<T>,
    domain: Box<dyn Domain<T>>,
    rng: ChaCha8Rng,
    episode: TaskEpisode<T>,
    phase: Phase,
    step: usize,
    total_reward: T,
    last_state: Option<PendulumState<T>>,
    last_reward: T,
    led_label: String,
    episode_index: u64,
    resets: u64,
    last_record: Option<TrajectoryRecord>,
    sink: Option<Box<dyn RecordSink>>,
}

impl<T: Real> Env<T> {
    /// An environment on the simulated device.
    pub fn new(config: EnvConfig<T>) -> Result<Self> {
        config.validate()?;
        let domain = SimDomain::new(config.params, config.domain, config.controllers)?;
        Self::with_domain(config, Box::new(domain))
    }

    /// An environment on any backend. `config.domain` is ignored in favour
    /// of the backend's own configuration.
    pub fn with_domain(mut config: EnvConfig<T>, domain: Box<dyn Domain<T>>) -> Result<Self> {
        config.domain = *domain.config();
        config.validate()?;
        Ok(Self {
            rng: ChaCha8Rng::seed_from_u64(config.seed),
            config,
            domain,
            episode: TaskEpisode {
                target: None,
                rotor: None,
            },
            phase: Phase::Fresh,
            step: 0,
            total_reward: T::zero(),
            last_state: None,
            last_reward: T::zero(),
            led_label: IndicatorColor::Red.as_str().to_string(),
            episode_index: 0,
            resets: 0,
            last_record: None,
            sink: None,
        })
    }

    /// Streams every step's record into `sink`; flushed on close.
    pub fn attach_sink(&mut self, sink: Box<dyn RecordSink>) {
        self.sink = Some(sink);
    }

    /// Episode number used for the next reset (otherwise counts resets from 0).
    pub fn set_episode_index(&mut self, index: u64) {
        self.episode_index = index;
    }

    /// Restarts the random stream as if the environment had been built with `seed`.
    pub fn seed(&mut self, seed: u64) {
        self.config.seed = seed;
        self.rng = ChaCha8Rng::seed_from_u64(seed);
    }

    pub fn config(&self) -> &EnvConfig<T> {
        &self.config
    }

    pub fn task(&self) -> &TaskSpec<T> {
        &self.config.task
    }

    pub fn domain(&self) -> &dyn Domain<T> {
        self.domain.as_ref()
    }

    pub fn observation_dim(&self) -> usize {
        self.config.task.observation_dim()
    }

    /// Steps taken in the current episode.
    pub fn step_index(&self) -> usize {
        self.step
    }

    /// Sum of rewards in the current episode.
    pub fn total_reward(&self) -> T {
        self.total_reward
    }

    /// Follow target of the current episode.
    pub fn target(&self) -> Option<T> {
        self.episode.target
    }

    pub fn episode_index(&self) -> u64 {
        self.episode_index
    }

    pub fn last_record(&self) -> Option<&TrajectoryRecord> {
        self.last_record.as_ref()
    }

    pub fn is_closed(&self) -> bool {
        self.phase == Phase::Closed
    }

    fn reset_target(&mut self) -> Result<ResetTarget<T>> {
        Ok(match self.config.task.initial {
            InitialState::Down => ResetTarget::Down,
            InitialState::Exact(state) => ResetTarget::Arbitrary(state),
            InitialState::PerturbedUpright {
                alpha_std,
                alpha_dot_std,
            } => {
                let alpha = gaussian(&mut self.rng, alpha_std.as_f64())?;
                let alpha_dot = gaussian(&mut self.rng, alpha_dot_std.as_f64())?;
                ResetTarget::Arbitrary(PendulumState::new(
                    T::zero(),
                    T::lit(alpha),
                    T::zero(),
                    T::lit(alpha_dot),
                )?)
            }
        })
    }

    /// Resets the plant to the task's initial state and starts an episode.
    pub fn reset(&mut self) -> Result<Observation<T>> {
        if self.phase == Phase::Closed {
            return Err(Error::Protocol("environment is closed"));
        }
        if self.resets > 0 {
            self.episode_index += 1;
        }
        self.resets += 1;
        let target = self.reset_target()?;
        self.domain.reset(target)?;
        let state = self.domain.read_full_state()?;
        let spec = self.config.task;
        self.episode = TaskEpisode::begin(&spec, &state, &mut self.rng);
        let reward = self.episode.peek_reward(&spec, &state)?;
        let color = IndicatorColor::for_reward(reward, spec.indicator_threshold);
        let from = self.domain.indicator();
        self.domain.set_indicator(color);
        self.led_label = format!("{}->{}", from.as_str(), color.as_str());
        self.step = 0;
        self.total_reward = T::zero();
        self.last_state = Some(state);
        self.last_reward = reward;
        self.last_record = None;
        self.phase = Phase::Running;
        Ok(make_observation(&state, self.episode.target))
    }

    /// Applies one action.
    pub fn step(&mut self, action: Action<T>) -> Result<StepResult<T>> {
        match self.phase {
            Phase::Closed => return Err(Error::Protocol("environment is closed")),
            Phase::Fresh => return Err(Error::Protocol("step called before reset")),
            Phase::Done => return Err(Error::Protocol("step called after the episode ended")),
            Phase::Running => {}
        }
        let commanded = action.voltage;
        self.domain.step(commanded)?;
        let actuated = self.domain.last_actuated();
        let state = self.domain.read_full_state()?;
        let spec = self.config.task;
        let reward = self.episode.reward(&spec, &state)?;
        self.step += 1;
        self.total_reward = self.total_reward + reward;
        let done = is_terminal(&state, &spec, self.step);
        let color = IndicatorColor::for_reward(reward, spec.indicator_threshold);
        self.domain.set_indicator(color);
        self.led_label = color.as_str().to_string();
        self.last_state = Some(state);
        self.last_reward = reward;
        if done {
            self.phase = Phase::Done;
        }
        let observation = make_observation(&state, self.episode.target);
        let time = self.domain.time();

        let mut info = Info::new();
        info.insert("step", InfoValue::Int(self.step as i64));
        info.insert("time", InfoValue::Real(time));
        info.insert("indicator", InfoValue::Text(color.as_str().to_string()));
        info.insert("overruns", InfoValue::Int(self.domain.overruns() as i64));
        info.insert("voltage_commanded", InfoValue::Real(commanded.as_f64()));
        info.insert("voltage_actuated", InfoValue::Real(actuated.as_f64()));
        if let Some(t) = self.episode.target {
            info.insert("target", InfoValue::Real(t.as_f64()));
        }
        if let Some(rotor) = &self.episode.rotor {
            info.insert("rotations", InfoValue::Int(rotor.rotations_awarded as i64));
        }
        if spec.sparse {
            let dense = dense_reward(spec.kind, &state, self.episode.target)?;
            info.insert("dense_reward", InfoValue::Real(dense.as_f64()));
        }
        if self.config.domain.oracle_state {
            if let Some(truth) = self.domain.ground_truth() {
                info.insert("ground_truth", InfoValue::State(truth.to_array().map(|v| v.as_f64())));
            }
        }

        let record = TrajectoryRecord {
            episode: self.episode_index,
            step: self.step as u64,
            time,
            theta: state.theta.as_f64(),
            alpha: state.alpha.as_f64(),
            theta_dot: state.theta_dot.as_f64(),
            alpha_dot: state.alpha_dot.as_f64(),
            observation: observation.values().iter().map(|v| v.as_f64()).collect(),
            voltage_commanded: commanded.as_f64(),
            voltage_actuated: actuated.as_f64(),
            reward: reward.as_f64(),
            indicator: color,
            done,
        };
        if let Some(sink) = &mut self.sink {
            sink.push(&record)?;
        }
        self.last_record = Some(record);

        Ok(StepResult {
            observation,
            reward,
            done,
            info,
        })
    }

    /// The render line (or CSV row) for the current state.
    pub fn render(&self, mode: RenderMode) -> Result<String> {
        if self.phase == Phase::Closed {
            return Err(Error::Protocol("environment is closed"));
        }
        let state = match self.last_state {
            Some(s) => s,
            None => self.domain.read_full_state()?,
        };
        let time = self.domain.time();
        let v = self.domain.last_actuated();
        let name = self.config.task.name();
        Ok(match mode {
            RenderMode::Text => format!(
                "{} task={} return={:.6}",
                render_line(time, &state, v, self.last_reward, &self.led_label),
                name,
                self.total_reward.as_f64()
            ),
            RenderMode::CsvFrame => format!(
                "{},{},{},{},{},{},{},{}",
                time,
                state.theta.as_f64(),
                state.alpha.as_f64(),
                v.as_f64(),
                self.last_reward.as_f64(),
                self.led_label,
                name,
                self.total_reward.as_f64()
            ),
        })
    }

    /// Flushes any attached sink and releases the domain. Idempotent.
    pub fn close(&mut self) -> Result<()> {
        if self.phase == Phase::Closed {
            return Ok(());
        }
        self.phase = Phase::Closed;
        self.domain.close();
        match &mut self.sink {
            Some(sink) => sink.flush(),
            None => Ok(()),
        }
    }
}

impl<T: Real> Drop for Env<T> {
    fn drop(&mut self) {
        // errors cannot be reported from drop; callers who care call close()
        let _ = self.close();
    }
}

fn gaussian(rng: &mut ChaCha8Rng, std: f64) -> Result<f64> {
    if std == 0.0 {
        return Ok(0.0);
    }
    let normal = Normal::new(0.0, std).map_err(|e| Error::invalid("initial", e.to_string()))?;
    Ok(normal.sample(rng))
}

/// Every canonical task kind with its observation length.
pub fn task_table() -> Vec<(String, usize, &'static str)> {
    crate::tasks::task_names()
        .into_iter()
        .map(|name| {
            let base = name.trim_end_matches("-sparse");
            let kind = TaskKind::ALL
                .into_iter()
                .find(|k| k.name() == base)
                .unwrap_or(TaskKind::Balance);
            (name, kind.observation_dim(), kind.description())
        })
        .collect()
}
