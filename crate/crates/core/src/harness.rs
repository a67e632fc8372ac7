//! Episode runner, benchmark driver and result summaries.

use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::config::KeyValue;
use crate::controllers::{make_controller, Controller, ControllerConfig, ControllerContext, CONTROLLER_NAMES};
use crate::domain::DomainConfig;
use crate::env::{Env, EnvConfig, StepResult};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::state::PhysicalParams;
use crate::tasks::TaskSpec;
use crate::trajectory::{RecordSink, TrajectoryRecord};

/// Result of one episode.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EpisodeOutcome {
    /// Reward sum divided by the task's `episode_steps`, so episodes that end
    /// early are penalized for the steps they did not play.
    pub normalized_return: f64,
    pub steps: usize,
    pub total_reward: f64,
}

/// Called after every step with the environment and the step result.
pub type StepObserver<'a, T> = &'a mut dyn FnMut(&Env<T>, &StepResult<T>);

/// Resets `env`, then steps `controller` until the episode ends.
pub fn run_episode<T: Real>(
    env: &mut Env<T>,
    controller: &mut dyn Controller<T>,
    sink: Option<&mut dyn RecordSink>,
) -> Result<EpisodeOutcome> {
    run_episode_observed(env, controller, sink, None)
}

/// [`run_episode`] with a per-step callback (used for live rendering).
pub fn run_episode_observed<T: Real>(
    env: &mut Env<T>,
    controller: &mut dyn Controller<T>,
    mut sink: Option<&mut dyn RecordSink>,
    mut observer: Option<StepObserver<'_, T>>,
) -> Result<EpisodeOutcome> {
    let result = (|| {
        let mut obs = env.reset()?;
        controller.reset();
        loop {
            let action = controller.act(&obs);
            let step = env.step(action)?;
            if let (Some(sink), Some(record)) = (sink.as_deref_mut(), env.last_record()) {
                sink.push(record)?;
            }
            if let Some(observe) = observer.as_deref_mut() {
                observe(env, &step);
            }
            if step.done {
                break;
            }
            obs = step.observation;
        }
        let total = env.total_reward().as_f64();
        Ok(EpisodeOutcome {
            normalized_return: total / env.task().episode_steps as f64,
            steps: env.step_index(),
            total_reward: total,
        })
    })();
    // leave a partial log on disk even when the episode failed
    let flushed = match sink {
        Some(sink) => sink.flush(),
        None => Ok(()),
    };
    let outcome = result?;
    flushed?;
    Ok(outcome)
}

/// Population statistics; `std` divides by `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Stats {
    pub mean: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

pub fn summarize(values: &[f64]) -> Result<Stats> {
    if values.is_empty() {
        return Err(Error::Usage("cannot summarize an empty list of returns".into()));
    }
    let n = values.len() as f64;
    // Welford's update: one pass, no catastrophic cancellation
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for (i, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / (i + 1) as f64;
        m2 += delta * (x - mean);
    }
    Ok(Stats {
        mean,
        std: (m2 / n).max(0.0).sqrt(),
        min: values.iter().copied().fold(f64::INFINITY, f64::min),
        max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
    })
}

/// Everything a benchmark depends on.
#[derive(Debug, Clone)]
pub struct BenchmarkConfig {
    pub tasks: Vec<String>,
    pub controllers: Vec<String>,
    pub episodes: usize,
    pub seed: u64,
    pub params: PhysicalParams<f64>,
    pub domain: DomainConfig<f64>,
    pub controller_config: ControllerConfig<f64>,
    /// Key-value overrides applied to every task (episode length, goal box...).
    pub task_overrides: Option<String>,
    /// Use the sparse variant of every task.
    pub sparse: bool,
    /// Keep every step's record in the report.
    pub record: bool,
}

impl BenchmarkConfig {
    pub fn new(tasks: Vec<String>, controllers: Vec<String>, episodes: usize, seed: u64) -> Self {
        Self {
            tasks,
            controllers,
            episodes,
            seed,
            params: PhysicalParams::default(),
            domain: DomainConfig::default(),
            controller_config: ControllerConfig::default(),
            task_overrides: None,
            sparse: false,
            record: false,
        }
    }

    /// The task specification a name resolves to under this config.
    pub fn task_spec(&self, name: &str) -> Result<TaskSpec<f64>> {
        let mut spec = TaskSpec::from_name(name)?;
        if self.sparse && !spec.sparse {
            spec = spec.sparse(true).map_err(|_| {
                Error::Usage(format!("task `{name}` has no sparse variant"))
            })?;
        }
        if let Some(text) = &self.task_overrides {
            spec = spec.with_overrides(text, "task overrides")?;
        }
        Ok(spec)
    }

    fn validate(&self) -> Result<()> {
        if self.episodes == 0 {
            return Err(Error::Usage("episodes must be at least 1".into()));
        }
        if self.tasks.is_empty() || self.controllers.is_empty() {
            return Err(Error::Usage("need at least one task and one controller".into()));
        }
        for name in &self.tasks {
            self.task_spec(name)?;
        }
        for name in &self.controllers {
            if !CONTROLLER_NAMES.contains(&name.as_str()) {
                return Err(Error::Usage(format!(
                    "unknown controller `{name}`; valid controllers: {}",
                    CONTROLLER_NAMES.join(", ")
                )));
            }
        }
        self.params.validate()?;
        self.domain.validate()?;
        self.controller_config.validate()
    }

    /// SHA-256 over every setting that influences the `(task, controller)` runs.
    pub fn digest(&self, task: &str, controller: &str) -> Result<String> {
        let spec = self.task_spec(task)?;
        let mut text = String::new();
        let _ = writeln!(text, "task = {}", spec.name());
        let _ = writeln!(text, "controller = {controller}");
        let _ = writeln!(text, "episodes = {}", self.episodes);
        let _ = writeln!(text, "seed = {}", self.seed);
        for (section, body) in [
            ("task", spec.to_kv_string()),
            ("params", self.params.to_kv_string()),
            ("domain", self.domain.to_kv_string()),
            ("controllers", self.controller_config.to_kv_string()),
        ] {
            let _ = writeln!(text, "[{section}]\n{body}");
        }
        Ok(hex::encode(Sha256::digest(text.as_bytes())))
    }
}

/// Seed of episode `index` in a run seeded with `seed`.
pub fn episode_seed(seed: u64, index: u64) -> u64 {
    seed.wrapping_add(index)
}

/// Controller seeds are decorrelated from the environment's stream.
fn controller_seed(env_seed: u64) -> u64 {
    env_seed ^ 0x9e37_79b9_7f4a_7c15
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub task: String,
    pub controller: String,
    pub episode: u64,
    pub seed: u64,
    pub normalized_return: f64,
    pub steps: usize,
    pub total_reward: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchmarkSummary {
    pub task: String,
    pub controller: String,
    pub episodes: usize,
    pub mean_normalized_return: f64,
    pub std: f64,
    pub min: f64,
    pub max: f64,
    pub seed: u64,
    pub config_digest: String,
}

#[derive(Debug, Clone, Default)]
pub struct BenchmarkReport {
    pub summaries: Vec<BenchmarkSummary>,
    pub episodes: Vec<EpisodeResult>,
    /// Step records in episode order, when `record` was requested.
    pub trajectories: Vec<TrajectoryRecord>,
}

/// Builds the environment and controller for one episode of a benchmark.
pub fn episode_setup(
    cfg: &BenchmarkConfig,
    task: &str,
    controller: &str,
    index: u64,
) -> Result<(Env<f64>, Box<dyn Controller<f64>>)> {
    let seed = episode_seed(cfg.seed, index);
    let env_cfg = EnvConfig {
        task: cfg.task_spec(task)?,
        domain: cfg.domain,
        params: cfg.params,
        controllers: cfg.controller_config,
        seed,
    };
    let mut env = Env::new(env_cfg)?;
    env.set_episode_index(index);
    let ctl = make_controller(
        controller,
        &ControllerContext {
            params: cfg.params,
            config: cfg.controller_config,
            max_voltage: cfg.domain.max_voltage,
            seed: controller_seed(seed),
        },
    )?;
    Ok((env, ctl))
}

fn run_one(
    cfg: &BenchmarkConfig,
    task: &str,
    controller: &str,
    index: u64,
) -> Result<(EpisodeResult, Vec<TrajectoryRecord>)> {
    let (mut env, mut ctl) = episode_setup(cfg, task, controller, index)?;
    let mut records = Vec::new();
    let sink: Option<&mut dyn RecordSink> = if cfg.record { Some(&mut records) } else { None };
    let outcome = run_episode(&mut env, ctl.as_mut(), sink)?;
    env.close()?;
    Ok((
        EpisodeResult {
            task: task.to_string(),
            controller: controller.to_string(),
            episode: index,
            seed: episode_seed(cfg.seed, index),
            normalized_return: outcome.normalized_return,
            steps: outcome.steps,
            total_reward: outcome.total_reward,
        },
        records,
    ))
}

/// Runs every `task x controller` pair for `episodes` episodes with a
/// fresh environment per episode. Episodes run in parallel in virtual-clock
/// mode; the output order and values do not depend on scheduling.
pub fn benchmark(cfg: &BenchmarkConfig) -> Result<BenchmarkReport> {
    cfg.validate()?;
    let mut report = BenchmarkReport::default();
    for task in &cfg.tasks {
        for controller in &cfg.controllers {
            let indices: Vec<u64> = (0..cfg.episodes as u64).collect();
            let results: Vec<Result<(EpisodeResult, Vec<TrajectoryRecord>)>> = if cfg.domain.realtime {
                indices.iter().map(|&i| run_one(cfg, task, controller, i)).collect()
            } else {
                indices.par_iter().map(|&i| run_one(cfg, task, controller, i)).collect()
            };
            let mut returns = Vec::with_capacity(cfg.episodes);
            for r in results {
                let (episode, records) = r?;
                returns.push(episode.normalized_return);
                report.episodes.push(episode);
                report.trajectories.extend(records);
            }
            let stats = summarize(&returns)?;
            report.summaries.push(BenchmarkSummary {
                task: cfg.task_spec(task)?.name(),
                controller: controller.clone(),
                episodes: cfg.episodes,
                mean_normalized_return: stats.mean,
                std: stats.std,
                min: stats.min,
                max: stats.max,
                seed: cfg.seed,
                config_digest: cfg.digest(task, controller)?,
            });
        }
    }
    Ok(report)
}

/// Writes one JSON object per line.
pub fn write_jsonl<S: Serialize>(items: &[S], path: &Path) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(file);
    for item in items {
        serde_json::to_writer(&mut w, item).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: e.to_string(),
        })?;
        w.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    }
    w.flush().map_err(|e| Error::io(path, e))
}

pub fn read_jsonl<D: for<'de> Deserialize<'de>>(path: &Path) -> Result<Vec<D>> {
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(path, e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line).map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            message: format!("line {}: {e}", i + 1),
        })?);
    }
    Ok(out)
}

/// One parsed text render line.
#[derive(Debug, Clone, PartialEq)]
pub struct RenderFrame {
    pub time: f64,
    pub theta: f64,
    pub alpha: f64,
    pub voltage: f64,
    pub reward: f64,
    pub led: String,
    pub task: Option<String>,
    pub total_reward: Option<f64>,
}

/// Parses a line produced by [`Env::render`] in text mode (or a bare
/// domain render line).
pub fn parse_render_line(line: &str) -> Result<RenderFrame> {
    let bad = |message: String| Error::Parse {
        path: "<render>".into(),
        message,
    };
    let mut fields = std::collections::HashMap::new();
    for token in line.split_whitespace() {
        let (k, v) = token
            .split_once('=')
            .ok_or_else(|| bad(format!("token `{token}` is not key=value")))?;
        fields.insert(k, v);
    }
    let num = |k: &str| -> Result<f64> {
        fields
            .get(k)
            .ok_or_else(|| bad(format!("missing `{k}`")))?
            .parse()
            .map_err(|_| bad(format!("bad `{k}`")))
    };
    Ok(RenderFrame {
        time: num("t")?,
        theta: num("theta")?,
        alpha: num("alpha")?,
        voltage: num("V")?,
        reward: num("r")?,
        led: fields
            .get("led")
            .ok_or_else(|| bad("missing `led`".into()))?
            .to_string(),
        task: fields.get("task").map(|s| s.to_string()),
        total_reward: match fields.get("return") {
            Some(v) => Some(v.parse().map_err(|_| bad("bad `return`".into()))?),
            None => None,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summarize_examples() {
        assert_eq!(
            summarize(&[1.0, 1.0, 1.0]).unwrap(),
            Stats { mean: 1.0, std: 0.0, min: 1.0, max: 1.0 }
        );
        assert_eq!(
            summarize(&[0.0, 1.0]).unwrap(),
            Stats { mean: 0.5, std: 0.5, min: 0.0, max: 1.0 }
        );
        assert!(summarize(&[]).unwrap_err().is_usage());
    }

    #[test]
    fn render_line_parses() {
        let f = parse_render_line("t=0.0040 theta=0.1 alpha=-3.0 V=3.0000 r=0.5 led=yellow->green task=balance return=0.5")
            .unwrap();
        assert_eq!(f.led, "yellow->green");
        assert_eq!(f.task.as_deref(), Some("balance"));
        assert!(parse_render_line("t=1 theta").is_err());
    }

    #[test]
    fn bad_benchmark_inputs_are_usage_errors() {
        let mut cfg = BenchmarkConfig::new(vec!["balance".into()], vec!["lqr".into()], 0, 1);
        assert!(benchmark(&cfg).unwrap_err().is_usage());
        cfg.episodes = 1;
        cfg.tasks = vec!["juggle".into()];
        assert!(benchmark(&cfg).unwrap_err().is_usage());
        cfg.tasks = vec!["balance".into()];
        cfg.controllers = vec!["mpc".into()];
        assert!(benchmark(&cfg).unwrap_err().is_usage());
    }
}
