//! Simulated Quanser Qube-Servo 2 rotary pendulum for reinforcement
//! learning: plant dynamics, a device layer with encoder and safety
//! realism, six reward tasks, classical baseline controllers, a Gym-style
//! environment and a benchmarking harness.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases at
//! the crate root fix it to `f64`, which is what the harness and CLI use.
//!
//! ```
//! use qube_gym::{Env, EnvConfig};
//! use qube_gym::controllers::{make_controller, ControllerContext};
//!
//! let cfg = EnvConfig::<f64>::from_task_name("balance", 1).unwrap();
//! let mut env = Env::new(cfg).unwrap();
//! let mut lqr = make_controller("lqr", &ControllerContext {
//!     params: cfg.params,
//!     config: cfg.controllers,
//!     max_voltage: cfg.domain.max_voltage,
//!     seed: 1,
//! }).unwrap();
//! let outcome = qube_gym::harness::run_episode(&mut env, lqr.as_mut(), None).unwrap();
//! assert!(outcome.normalized_return > 0.85);
//! ```

// `!(x > 0)` is used on purpose throughout: unlike `x <= 0` it also
// rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod controllers;
pub mod domain;
pub mod dynamics;
pub mod env;
pub mod error;
pub mod harness;
pub mod linalg;
pub mod scalar;
pub mod state;
pub mod tasks;
pub mod trajectory;

pub use config::KeyValue;
pub use domain::{Domain, IndicatorColor, ResetTarget, SensorFrame};
pub use env::{Env, EnvConfig, InfoValue, RenderMode, StepResult};
pub use error::{Error, Result};
pub use scalar::Real;
pub use state::{angle_from_down, make_observation, wrap_angle, Action, Observation, PendulumState, PhysicalParams};
pub use tasks::{TaskKind, TaskSpec};

pub type State = PendulumState<f64>;
pub type Params = PhysicalParams<f64>;
pub type DomainConfig = domain::DomainConfig<f64>;
pub type SimDomain = domain::SimDomain<f64>;
pub type ControllerConfig = controllers::ControllerConfig<f64>;
pub type Task = TaskSpec<f64>;
pub type QubeEnv = Env<f64>;
