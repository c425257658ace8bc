//! `diffopt`: config-driven runs, condition reports, bound reports, coupling
//! experiments and the GD / Langevin / designed-diffusion comparison.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use commands::{Fig1Params, Overrides};
use config::RunConfig;
use error::{CliError, Result};

#[derive(Debug, Parser)]
#[command(name = "diffopt", version, about = "Global optimization with Euler-discretized diffusions")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Debug, Args)]
struct GlobalArgs {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Overrides every seed in the configuration (fig1: first seed).
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (overrides `output_dir`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Number of replica chains (overrides `replicas`).
    #[arg(long, global = true)]
    replicas: Option<usize>,
    /// Worker threads; DIFFOPT_THREADS takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Replica chains with per-replica traces and an aggregate summary.
    Run,
    /// Gradient descent vs Langevin vs the designed diffusion on f = c·log(1+‖x‖²/2).
    Fig1(Fig1Args),
    /// Condition verifiers; failed conditions are reported, not errors.
    Verify,
    /// Explicit error bound with provenance of every constant.
    Bounds,
    /// Synchronous-coupling decay curve and fitted rate.
    Couple,
    /// Built-in objectives and their default parameters.
    ZooList,
}

#[derive(Debug, Args)]
struct Fig1Args {
    #[arg(long, default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 10.0)]
    c: f64,
    #[arg(long, default_value_t = 1.0)]
    gamma: f64,
    #[arg(long, default_value_t = 0.1)]
    eta: f64,
    /// Comma-separated start point.
    #[arg(long, default_value = "90,110", value_delimiter = ',', allow_hyphen_values = true)]
    x0: Vec<f64>,
    #[arg(long, default_value_t = 10_000)]
    steps: usize,
    /// Number of seeds, starting at --seed (default 0).
    #[arg(long, default_value_t = 20)]
    seeds: u64,
    /// f-level for first-passage steps.
    #[arg(long, default_value_t = 1.0)]
    threshold: f64,
    /// CSV row stride in steps.
    #[arg(long, default_value_t = 1)]
    every: usize,
}

fn thread_count(flag: Option<usize>) -> Result<Option<usize>> {
    match std::env::var("DIFFOPT_THREADS") {
        Ok(v) if !v.trim().is_empty() => v
            .trim()
            .parse::<usize>()
            .map(Some)
            .map_err(|_| CliError::Config(format!("DIFFOPT_THREADS = `{v}` is not a thread count"))),
        _ => Ok(flag),
    }
}

fn load(global: &GlobalArgs) -> Result<RunConfig> {
    let path = global.config.as_ref().ok_or_else(|| CliError::Config("--config PATH is required".into()))?;
    let mut cfg = RunConfig::load(path)?;
    Overrides { seed: global.seed, out: global.out.clone(), replicas: global.replicas }.apply(&mut cfg)?;
    Ok(cfg)
}

fn print_json(label: &str, path: PathBuf) {
    println!("{label}: {}", path.display());
}

fn dispatch(cli: Cli) -> Result<()> {
    if let Some(n) = thread_count(cli.global.threads)? {
        if n == 0 {
            return Err(CliError::Config("thread count must be at least 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Runtime(format!("thread pool: {e}")))?;
    }
    match &cli.command {
        Command::Run => {
            let cfg = load(&cli.global)?;
            let agg = commands::cmd_run(&cfg)?;
            println!(
                "{} replicas, best f mean {:.6e} (min {:.6e}), {} diverged",
                agg.replicas, agg.best_f_mean, agg.best_f_min, agg.diverged_replicas
            );
            print_json("aggregate", cfg.output_dir.join("aggregate.json"));
        }
        Command::Fig1(a) => {
            let first = cli.global.seed.unwrap_or(0);
            let p = Fig1Params {
                d: a.d,
                c: a.c,
                gamma: a.gamma,
                eta: a.eta,
                x0: a.x0.clone(),
                steps: a.steps,
                seeds: (first..first + a.seeds).collect(),
                threshold: a.threshold,
                every: a.every,
            };
            let dir = cli.global.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            let s = commands::cmd_fig1(&p, &dir)?;
            println!(
                "langevin diverged {}/{}, designed median first passage {:?}, gd first passage {:?}",
                s.langevin_diverged,
                p.seeds.len(),
                s.designed_median_first_passage,
                s.gd_first_passage
            );
            print_json("summary", dir.join("fig1_summary.json"));
        }
        Command::Verify => {
            let cfg = load(&cli.global)?;
            let r = commands::cmd_verify(&cfg)?;
            for (name, c) in &r.checks {
                match &c.error {
                    None => println!("{name}: satisfied"),
                    Some(e) => println!("{name}: not satisfied ({e})"),
                }
            }
            print_json("report", cfg.output_dir.join("verify.json"));
        }
        Command::Bounds => {
            let cfg = load(&cli.global)?;
            let out = commands::cmd_bounds(&cfg)?;
            for w in &out.report.warnings {
                eprintln!("warning: {w}");
            }
            println!(
                "total {:.6e} = integration {:.6e} + suboptimality {:.6e}",
                out.report.total, out.report.integration_bound, out.report.suboptimality
            );
            print_json("report", cfg.output_dir.join("bounds.json"));
        }
        Command::Couple => {
            let cfg = load(&cli.global)?;
            let r = commands::cmd_couple(&cfg)?;
            println!("fitted rate {:?} over {} replicas ({} excluded)", r.fitted_rate, r.used_reps, r.excluded_reps);
            print_json("report", cfg.output_dir.join("coupling.json"));
        }
        Command::ZooList => {
            commands::cmd_zoo_list(cli.global.out.as_deref())?;
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
