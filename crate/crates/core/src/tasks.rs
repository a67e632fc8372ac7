//! Task definitions: rewards, goal boxes, initial states and termination.
//!
//! Each task's cost is a normalized weighted angle error `c` in `[0, 1]`
//! and its reward is `1 - c`, so the goal state scores exactly 1 and the
//! farthest state scores 0.

use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::config::{fmt_real, parse_int, parse_real, KeyValue};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::{angle_delta, angle_from_down, PendulumState};

/// The six task families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum TaskKind {
    Dampen,
    Balance,
    SwingUp,
    BalanceFollow,
    SwingUpFollow,
    Rotor,
}

impl TaskKind {
    pub const ALL: [TaskKind; 6] = [
        TaskKind::Dampen,
        TaskKind::Balance,
        TaskKind::SwingUp,
        TaskKind::BalanceFollow,
        TaskKind::SwingUpFollow,
        TaskKind::Rotor,
    ];

    pub fn name(self) -> &'static str {
        match self {
            TaskKind::Dampen => "dampen",
            TaskKind::Balance => "balance",
            TaskKind::SwingUp => "swingup",
            TaskKind::BalanceFollow => "balance-follow",
            TaskKind::SwingUpFollow => "swingup-follow",
            TaskKind::Rotor => "rotor",
        }
    }

    pub fn is_follow(self) -> bool {
        matches!(self, TaskKind::BalanceFollow | TaskKind::SwingUpFollow)
    }

    /// Tasks that end when the pendulum falls over.
    pub fn is_balance(self) -> bool {
        matches!(self, TaskKind::Balance | TaskKind::BalanceFollow)
    }

    pub fn supports_sparse(self) -> bool {
        self != TaskKind::Rotor
    }

    /// Observation length: the four state components, plus the arm target
    /// for Follow tasks.
    pub fn observation_dim(self) -> usize {
        if self.is_follow() {
            5
        } else {
            4
        }
    }

    pub fn description(self) -> &'static str {
        match self {
            TaskKind::Dampen => "bring the pendulum to rest hanging down with the arm centered",
            TaskKind::Balance => "keep the pendulum upright starting almost inverted",
            TaskKind::SwingUp => "swing the pendulum up from hanging down and balance it",
            TaskKind::BalanceFollow => "balance upright while holding the arm at a random target",
            TaskKind::SwingUpFollow => "swing up, then balance with the arm at a random target",
            TaskKind::Rotor => "spin the pendulum through as many full rotations as possible",
        }
    }
}

impl fmt::Display for TaskKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// How each episode starts.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum InitialState<T> {
    /// Hanging at rest, reached by the dampening reset controller.
    Down,
    /// Almost inverted: `alpha ~ N(0, alpha_std)`, `alpha_dot ~ N(0, alpha_dot_std)`.
    PerturbedUpright { alpha_std: T, alpha_dot_std: T },
    /// A fixed state, placed directly. Simulation only.
    Exact(PendulumState<T>),
}

/// Goal-box half widths used by the sparse reward, in radians.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GoalBox<T> {
    pub alpha: T,
    pub theta: T,
}

impl<T: Real> Default for GoalBox<T> {
    fn default() -> Self {
        Self {
            alpha: T::lit(5f64.to_radians()),
            theta: T::lit(10f64.to_radians()),
        }
    }
}

/// A fully configured task.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskSpec<T> {
    pub kind: TaskKind,
    pub sparse: bool,
    pub episode_steps: usize,
    pub initial: InitialState<T>,
    /// Follow tasks draw their arm target uniformly from `±target_range`.
    pub target_range: T,
    pub goal_box: GoalBox<T>,
    /// Rewards at or above this light the indicator green.
    pub indicator_threshold: T,
}

impl<T: Real> TaskSpec<T> {
    /// Defaults for `kind`: 2048 steps, 2° / 0.05 rad/s upright
    /// perturbation, ±80° targets and 5°/10° goal boxes.
    pub fn new(kind: TaskKind) -> Self {
        let initial = if kind.is_balance() {
            InitialState::PerturbedUpright {
                alpha_std: T::lit(2f64.to_radians()),
                alpha_dot_std: T::lit(0.05),
            }
        } else {
            InitialState::Down
        };
        Self {
            kind,
            sparse: false,
            episode_steps: 2048,
            initial,
            target_range: T::lit(80f64.to_radians()),
            goal_box: GoalBox::default(),
            indicator_threshold: T::lit(0.8),
        }
    }

    pub fn sparse(mut self, sparse: bool) -> Result<Self> {
        if sparse && !self.kind.supports_sparse() {
            return Err(Error::UnsupportedTask(format!("{}-sparse", self.kind.name())));
        }
        self.sparse = sparse;
        Ok(self)
    }

    /// Parses a canonical task name such as `swingup` or `balance-follow-sparse`.
    pub fn from_name(name: &str) -> Result<Self> {
        let (base, sparse) = match name.strip_suffix("-sparse") {
            Some(base) => (base, true),
            None => (name, false),
        };
        let kind = TaskKind::ALL
            .into_iter()
            .find(|k| k.name() == base)
            .ok_or_else(|| {
                Error::Usage(format!(
                    "unknown task `{name}`; valid tasks: {}",
                    task_names().join(", ")
                ))
            })?;
        let spec = Self::new(kind);
        if sparse && !kind.supports_sparse() {
            return Err(Error::Usage(format!(
                "task `{base}` has no sparse variant; valid tasks: {}",
                task_names().join(", ")
            )));
        }
        spec.sparse(sparse)
    }

    pub fn name(&self) -> String {
        if self.sparse {
            format!("{}-sparse", self.kind.name())
        } else {
            self.kind.name().to_string()
        }
    }

    pub fn observation_dim(&self) -> usize {
        self.kind.observation_dim()
    }

    /// The reward the task emits for `state`: the dense formula, or the
    /// goal-box indicator for sparse variants. Rotor is handled by
    /// [`RotorProgress`] and is rejected here.
    pub fn reward(&self, state: &PendulumState<T>, target: Option<T>) -> Result<T> {
        if self.sparse {
            sparsify(self, state, target)
        } else {
            dense_reward(self.kind, state, target)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.episode_steps == 0 {
            return Err(Error::invalid("episode_steps", "must be at least 1"));
        }
        if self.sparse && !self.kind.supports_sparse() {
            return Err(Error::UnsupportedTask(self.name()));
        }
        if !(self.target_range >= T::zero()) || self.target_range > T::PI() {
            return Err(Error::invalid("target_range", "must lie in [0, pi]"));
        }
        if !(self.goal_box.alpha > T::zero()) || !(self.goal_box.theta > T::zero()) {
            return Err(Error::invalid("goal_box", "half widths must be positive"));
        }
        if let InitialState::PerturbedUpright {
            alpha_std,
            alpha_dot_std,
        } = self.initial
        {
            if !(alpha_std >= T::zero()) || !(alpha_dot_std >= T::zero()) {
                return Err(Error::invalid("initial", "standard deviations must be non-negative"));
            }
        }
        Ok(())
    }
}

/// Episode-shape settings that can be overridden from a config file.
impl<T: Real> KeyValue for TaskSpec<T> {
    fn set(&mut self, key: &str, value: &str) -> std::result::Result<bool, String> {
        match key {
            "episode_steps" => self.episode_steps = parse_int(value)?,
            "target_range" => self.target_range = parse_real(value)?,
            "goal_alpha" => self.goal_box.alpha = parse_real(value)?,
            "goal_theta" => self.goal_box.theta = parse_real(value)?,
            "indicator_threshold" => self.indicator_threshold = parse_real(value)?,
            "initial_alpha_std" | "initial_alpha_dot_std" => match &mut self.initial {
                InitialState::PerturbedUpright {
                    alpha_std,
                    alpha_dot_std,
                } => {
                    let v = parse_real(value)?;
                    if key == "initial_alpha_std" {
                        *alpha_std = v;
                    } else {
                        *alpha_dot_std = v;
                    }
                }
                InitialState::Down | InitialState::Exact(_) => {
                    return Err("only upright-start tasks have a perturbation".into())
                }
            },
            _ => return Ok(false),
        }
        Ok(true)
    }

    fn entries(&self) -> Vec<(&'static str, String)> {
        let mut out = vec![
            ("episode_steps", self.episode_steps.to_string()),
            ("target_range", fmt_real(self.target_range)),
            ("goal_alpha", fmt_real(self.goal_box.alpha)),
            ("goal_theta", fmt_real(self.goal_box.theta)),
            ("indicator_threshold", fmt_real(self.indicator_threshold)),
        ];
        if let InitialState::PerturbedUpright {
            alpha_std,
            alpha_dot_std,
        } = self.initial
        {
            out.push(("initial_alpha_std", fmt_real(alpha_std)));
            out.push(("initial_alpha_dot_std", fmt_real(alpha_dot_std)));
        }
        out
    }

    fn validate(&self) -> Result<()> {
        TaskSpec::validate(self)
    }
}

/// Every canonical task name, dense and sparse.
pub fn task_names() -> Vec<String> {
    let mut out = Vec::new();
    for kind in TaskKind::ALL {
        out.push(kind.name().to_string());
        if kind.supports_sparse() {
            out.push(format!("{}-sparse", kind.name()));
        }
    }
    out
}

/// Balance and SwingUp: `1 - (0.8 |alpha| + 0.2 |theta|) / pi`.
pub fn reward_balance<T: Real>(state: &PendulumState<T>) -> T {
    let cost = (T::lit(0.8) * state.alpha.abs() + T::lit(0.2) * state.theta.abs()) / T::PI();
    T::one() - cost
}

/// Dampen: `1 - (0.8 angle_from_down(alpha) + 0.2 |theta|) / pi`.
pub fn reward_dampen<T: Real>(state: &PendulumState<T>) -> Result<T> {
    let down = angle_from_down(state.alpha)?;
    let cost = (T::lit(0.8) * down + T::lit(0.2) * state.theta.abs()) / T::PI();
    Ok(T::one() - cost)
}

/// Follow tasks: `max(1 - (0.8 |alpha| + 0.2 |target - theta|) / pi, 0)`.
/// The arm error is the raw difference, which can reach `2 pi`.
pub fn reward_follow<T: Real>(state: &PendulumState<T>, theta_target: T) -> T {
    let cost = (T::lit(0.8) * state.alpha.abs() + T::lit(0.2) * (theta_target - state.theta).abs())
        / T::PI();
    (T::one() - cost).max(T::zero())
}

/// The dense reward for any task but Rotor.
pub fn dense_reward<T: Real>(kind: TaskKind, state: &PendulumState<T>, target: Option<T>) -> Result<T> {
    match kind {
        TaskKind::Balance | TaskKind::SwingUp => Ok(reward_balance(state)),
        TaskKind::Dampen => reward_dampen(state),
        TaskKind::BalanceFollow | TaskKind::SwingUpFollow => {
            let target = target.ok_or(Error::Protocol("follow task reward needs a target"))?;
            Ok(reward_follow(state, target))
        }
        TaskKind::Rotor => Err(Error::UnsupportedTask(
            "rotor reward depends on episode history; use RotorProgress".into(),
        )),
    }
}

/// 1 inside the task's goal box, else 0.
pub fn sparsify<T: Real>(spec: &TaskSpec<T>, state: &PendulumState<T>, target: Option<T>) -> Result<T> {
    let gb = spec.goal_box;
    let inside = match spec.kind {
        TaskKind::Balance | TaskKind::SwingUp => {
            state.alpha.abs() <= gb.alpha && state.theta.abs() <= gb.theta
        }
        TaskKind::Dampen => angle_from_down(state.alpha)? <= gb.alpha && state.theta.abs() <= gb.theta,
        TaskKind::BalanceFollow | TaskKind::SwingUpFollow => {
            let target = target.ok_or(Error::Protocol("follow task reward needs a target"))?;
            state.alpha.abs() <= gb.alpha && (target - state.theta).abs() <= gb.theta
        }
        TaskKind::Rotor => return Err(Error::UnsupportedTask("rotor-sparse".into())),
    };
    Ok(if inside { T::one() } else { T::zero() })
}

/// Arm target for a Follow episode, uniform on `[-range, range]`.
pub fn sample_target<T: Real, R: Rng + ?Sized>(rng: &mut R, range: T) -> T {
    let u: f64 = rng.random_range(-1.0..=1.0);
    T::lit(u) * range
}

/// True when the episode is over: the step budget is spent, the arm passed
/// ±pi/2, or (Balance tasks) the pendulum fell past ±pi/2.
pub fn is_terminal<T: Real>(state: &PendulumState<T>, spec: &TaskSpec<T>, step: usize) -> bool {
    let limit = T::FRAC_PI_2();
    step >= spec.episode_steps
        || state.theta.abs() > limit
        || (spec.kind.is_balance() && state.alpha.abs() > limit)
}

/// Rotation counter for the Rotor task.
///
/// Tracks the unwrapped pendulum angle and pays 1 on the step where the
/// largest net excursion from the starting angle first reaches another
/// whole turn. Swinging back and forth across a turn boundary therefore
/// pays only once.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotorProgress<T> {
    pub start_alpha: T,
    pub unwrapped_alpha: T,
    last_wrapped: T,
    pub rotations_awarded: u64,
}

impl<T: Real> RotorProgress<T> {
    pub fn new(alpha: T) -> Self {
        Self {
            start_alpha: alpha,
            unwrapped_alpha: alpha,
            last_wrapped: alpha,
            rotations_awarded: 0,
        }
    }

    /// Net unwrapped displacement since the episode started.
    pub fn displacement(&self) -> T {
        self.unwrapped_alpha - self.start_alpha
    }

    /// Folds in the next observed angle and returns the step reward.
    pub fn update(&mut self, alpha: T) -> T {
        self.unwrapped_alpha = self.unwrapped_alpha + angle_delta(alpha, self.last_wrapped);
        self.last_wrapped = alpha;
        let turns = (self.displacement().abs() / (T::PI() + T::PI()))
            .floor()
            .to_u64()
            .unwrap_or(0);
        if turns > self.rotations_awarded {
            self.rotations_awarded = turns;
            T::one()
        } else {
            T::zero()
        }
    }
}

/// Per-episode mutable task state: the Follow target and Rotor counter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TaskEpisode<T> {
    pub target: Option<T>,
    pub rotor: Option<RotorProgress<T>>,
}

impl<T: Real> TaskEpisode<T> {
    /// Starts an episode at `state`, drawing a target for Follow tasks.
    pub fn begin<R: Rng + ?Sized>(spec: &TaskSpec<T>, state: &PendulumState<T>, rng: &mut R) -> Self {
        Self {
            target: spec
                .kind
                .is_follow()
                .then(|| sample_target(rng, spec.target_range)),
            rotor: (spec.kind == TaskKind::Rotor).then(|| RotorProgress::new(state.alpha)),
        }
    }

    /// Reward for the current state. Rotor updates its counter.
    pub fn reward(&mut self, spec: &TaskSpec<T>, state: &PendulumState<T>) -> Result<T> {
        match &mut self.rotor {
            Some(progress) => Ok(progress.update(state.alpha)),
            None => spec.reward(state, self.target),
        }
    }

    /// Reward the current state would earn without touching episode
    /// history. Used to color the indicator right after a reset.
    pub fn peek_reward(&self, spec: &TaskSpec<T>, state: &PendulumState<T>) -> Result<T> {
        match self.rotor {
            Some(mut progress) => Ok(progress.update(state.alpha)),
            None => spec.reward(state, self.target),
        }
    }
}

impl FromStr for TaskKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TaskSpec::<f64>::from_name(s).and_then(|spec| {
            if spec.sparse {
                Err(Error::Usage(format!("`{s}` names a sparse variant, not a task kind")))
            } else {
                Ok(spec.kind)
            }
        })
    }
}
