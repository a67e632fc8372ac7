//! Command-line front end: run and benchmark controllers on the simulated
//! Qube, and list the available tasks and controllers.
//!
//! Exit codes: 0 on success, 2 on usage errors, 1 on runtime failures.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use qube_gym::controllers::{controller_description, CONTROLLER_NAMES};
use qube_gym::env::{task_table, RenderMode};
use qube_gym::harness::{
    benchmark, episode_setup, run_episode_observed, summarize, write_jsonl, BenchmarkConfig,
    BenchmarkSummary, EpisodeResult,
};
use qube_gym::trajectory::{RecordSink, TrajectoryFormat, TrajectoryWriter};
use qube_gym::{ControllerConfig, DomainConfig, Error, KeyValue, Params, Result};

#[derive(Parser)]
#[command(name = "qube-gym", version, about = "Simulated Qube-Servo 2 pendulum: run and benchmark controllers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one controller on one task and log its trajectory.
    Run(RunArgs),
    /// Run every task x controller pair and write summaries.
    Bench(BenchArgs),
    /// Print the canonical task names.
    ListTasks,
    /// Print the canonical controller names.
    ListControllers,
    /// Print the effective configuration in key-value form.
    ShowConfig(ConfigArgs),
}

#[derive(Args, Clone)]
struct ConfigArgs {
    /// Control frequency in Hz (overrides the domain config).
    #[arg(long)]
    frequency: Option<f64>,
    /// Physical parameter overrides (key = value file).
    #[arg(long)]
    params: Option<PathBuf>,
    /// Domain configuration overrides (key = value file).
    #[arg(long = "domain-config")]
    domain_config: Option<PathBuf>,
    /// Controller gain overrides (key = value file).
    #[arg(long = "controller-config")]
    controller_config: Option<PathBuf>,
    /// Task overrides such as episode_steps (key = value file).
    #[arg(long = "task-config")]
    task_config: Option<PathBuf>,
    /// Report simulator ground truth instead of sensor estimates.
    #[arg(long = "oracle-state")]
    oracle_state: bool,
    /// Pace the control loop to wall-clock time.
    #[arg(long)]
    realtime: bool,
    /// Use the sparse-reward variant of the task.
    #[arg(long)]
    sparse: bool,
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    task: String,
    #[arg(long)]
    controller: String,
    #[arg(long, default_value_t = 1)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Trajectory output file.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value = "jsonl")]
    format: String,
    /// Print a text render line after every step.
    #[arg(long)]
    render: bool,
    /// Also write the summary (one JSON line) to this file.
    #[arg(long)]
    summary: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

#[derive(Args)]
struct BenchArgs {
    /// Comma-separated task names.
    #[arg(long, value_delimiter = ',', required = true)]
    tasks: Vec<String>,
    /// Comma-separated controller names.
    #[arg(long, value_delimiter = ',', required = true)]
    controllers: Vec<String>,
    #[arg(long, default_value_t = 10)]
    episodes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Summary output (JSONL, one line per pair).
    #[arg(long)]
    out: PathBuf,
    /// Per-episode returns output (JSONL).
    #[arg(long = "episodes-out")]
    episodes_out: Option<PathBuf>,
    #[command(flatten)]
    config: ConfigArgs,
}

fn benchmark_config(
    tasks: Vec<String>,
    controllers: Vec<String>,
    episodes: usize,
    seed: u64,
    args: &ConfigArgs,
) -> Result<BenchmarkConfig> {
    let mut cfg = BenchmarkConfig::new(tasks, controllers, episodes, seed);
    if let Some(p) = &args.params {
        cfg.params = Params::default().load_over(p)?;
    }
    if let Some(p) = &args.domain_config {
        cfg.domain = DomainConfig::default().load_over(p)?;
    }
    if let Some(p) = &args.controller_config {
        cfg.controller_config = ControllerConfig::default().load_over(p)?;
    }
    if let Some(p) = &args.task_config {
        let text = std::fs::read_to_string(p).map_err(|e| Error::Io {
            path: p.clone(),
            source: e,
        })?;
        cfg.task_overrides = Some(text);
    }
    if let Some(f) = args.frequency {
        cfg.domain = cfg
            .domain
            .with_overrides(&format!("frequency = {f}\n"), "--frequency")?;
    }
    cfg.domain.oracle_state |= args.oracle_state;
    cfg.domain.realtime |= args.realtime;
    cfg.sparse = args.sparse;
    Ok(cfg)
}

fn summary_line(summary: &BenchmarkSummary) -> Result<String> {
    serde_json::to_string(summary).map_err(|e| Error::Usage(e.to_string()))
}

fn cmd_run(args: RunArgs) -> Result<()> {
    let format: TrajectoryFormat = args.format.parse()?;
    let cfg = benchmark_config(
        vec![args.task.clone()],
        vec![args.controller.clone()],
        args.episodes,
        args.seed,
        &args.config,
    )?;
    // validate names and counts up front so usage errors exit with 2
    if args.episodes == 0 {
        return Err(Error::Usage("episodes must be at least 1".into()));
    }
    cfg.task_spec(&args.task)?;
    if !CONTROLLER_NAMES.contains(&args.controller.as_str()) {
        return Err(Error::Usage(format!(
            "unknown controller `{}`; valid controllers: {}",
            args.controller,
            CONTROLLER_NAMES.join(", ")
        )));
    }
    let mut writer = match &args.out {
        Some(path) => Some(TrajectoryWriter::create(path, format)?),
        None => None,
    };
    let stdout = std::io::stdout();
    let mut results = Vec::new();
    for index in 0..args.episodes as u64 {
        let (mut env, mut controller) = episode_setup(&cfg, &args.task, &args.controller, index)?;
        let mut render = |env: &qube_gym::QubeEnv, _: &qube_gym::StepResult<f64>| {
            if let Ok(line) = env.render(RenderMode::Text) {
                let _ = writeln!(stdout.lock(), "{line}");
            }
        };
        let observer: Option<qube_gym::harness::StepObserver<'_, f64>> =
            if args.render { Some(&mut render) } else { None };
        let sink = writer.as_mut().map(|w| w as &mut dyn RecordSink);
        let outcome = run_episode_observed(&mut env, controller.as_mut(), sink, observer)?;
        env.close()?;
        results.push(EpisodeResult {
            task: env.task().name(),
            controller: args.controller.clone(),
            episode: index,
            seed: qube_gym::harness::episode_seed(args.seed, index),
            normalized_return: outcome.normalized_return,
            steps: outcome.steps,
            total_reward: outcome.total_reward,
        });
    }
    let returns: Vec<f64> = results.iter().map(|r| r.normalized_return).collect();
    let stats = summarize(&returns)?;
    let summary = BenchmarkSummary {
        task: cfg.task_spec(&args.task)?.name(),
        controller: args.controller.clone(),
        episodes: args.episodes,
        mean_normalized_return: stats.mean,
        std: stats.std,
        min: stats.min,
        max: stats.max,
        seed: args.seed,
        config_digest: cfg.digest(&args.task, &args.controller)?,
    };
    if let Some(path) = &args.summary {
        write_jsonl(std::slice::from_ref(&summary), path)?;
    }
    println!("{}", summary_line(&summary)?);
    Ok(())
}

fn cmd_bench(args: BenchArgs) -> Result<()> {
    let cfg = benchmark_config(args.tasks, args.controllers, args.episodes, args.seed, &args.config)?;
    let report = benchmark(&cfg)?;
    write_jsonl(&report.summaries, &args.out)?;
    if let Some(path) = &args.episodes_out {
        write_jsonl(&report.episodes, path)?;
    }
    for s in &report.summaries {
        println!("{}", summary_line(s)?);
    }
    Ok(())
}

fn cmd_show_config(args: ConfigArgs) -> Result<()> {
    let cfg = benchmark_config(vec!["balance".into()], vec!["lqr".into()], 1, 0, &args)?;
    println!("# physical parameters\n{}", cfg.params.to_kv_string());
    println!("# domain\n{}", cfg.domain.to_kv_string());
    println!("# controllers\n{}", cfg.controller_config.to_kv_string());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Run(args) => cmd_run(args),
        Command::Bench(args) => cmd_bench(args),
        Command::ListTasks => {
            for (name, dim, description) in task_table() {
                println!("{name:<22} obs={dim}  {description}");
            }
            Ok(())
        }
        Command::ListControllers => {
            for name in CONTROLLER_NAMES {
                println!("{name:<8} {}", controller_description(name).unwrap_or(""));
            }
            Ok(())
        }
        Command::ShowConfig(args) => cmd_show_config(args),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_usage() || matches!(e, Error::UnsupportedTask(_)) { 2 } else { 1 })
        }
    }
}
