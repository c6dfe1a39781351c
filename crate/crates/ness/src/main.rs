//! Thin command-line front end over [`ness::experiments`].
//!
//! Exit codes: 0 success, 1 configuration error, 2 solver failures above the
//! configured rate, 3 bound violation detected.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ness::experiments::{run, ExperimentKind, ResolvedConfig, RunConfig, RunOutcome};
use ness::ribbon::RibbonSpec;

#[derive(Parser)]
#[command(name = "ness", version, about = "Steady-state currents of open quantum systems")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a batch experiment described by a JSON config.
    Run {
        /// Path to the run configuration.
        #[arg(long)]
        config: PathBuf,
        /// Override the config seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Validate and echo the resolved configuration, then exit.
        #[arg(long)]
        validate_only: bool,
    },
    /// Steady-state report for one explicit system.
    Single {
        /// Path to the matrices (JSON: statistics, h, a, d, optional q0 and
        /// times).
        #[arg(long)]
        input: PathBuf,
        /// Write the report here instead of stdout only.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Current and particle densities of a shift-invariant ribbon.
    Ribbon {
        /// Path to the ribbon spec (JSON: d, n_k, hoppings_h/a/d).
        #[arg(long)]
        config: PathBuf,
        /// Override the output path for the per-node CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Worker threads (default: all cores).
        #[arg(long)]
        jobs: Option<usize>,
        /// Validate the spec, then exit.
        #[arg(long)]
        validate_only: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(cli: Cli) -> ness::Result<ExitCode> {
    match cli.command {
        Command::Run { config, seed, out, jobs, validate_only } => {
            let mut raw = RunConfig::from_path(&config)?;
            if let Some(seed) = seed {
                raw.seed = seed;
            }
            if let Some(out) = out {
                raw.output_path = Some(out);
            }
            let resolved = raw.resolve()?;
            if validate_only {
                println!("{}", serde_json::to_string_pretty(&resolved)?);
                return Ok(ExitCode::SUCCESS);
            }
            let outcome = in_pool(jobs, || run(&resolved))?;
            finish(&resolved, outcome)
        }
        Command::Single { input, out } => {
            let text = std::fs::read_to_string(&input).map_err(|e| {
                ness::Error::Config(format!("cannot read {}: {e}", input.display()))
            })?;
            let single = serde_json::from_str(&text)
                .map_err(|e| ness::Error::Config(e.to_string()))?;
            let raw = RunConfig {
                experiment: ExperimentKind::SingleSystem,
                n_realizations: 1,
                seed: 0,
                ensemble: Default::default(),
                designed_ensemble: None,
                lambda_log_range: None,
                gamma_log_range: None,
                fixed_lambda: None,
                tolerances: Default::default(),
                output_path: out,
                max_failure_rate: None,
                ribbon: None,
                single: Some(single),
            };
            let resolved = raw.resolve()?;
            let outcome = run(&resolved)?;
            finish(&resolved, outcome)
        }
        Command::Ribbon { config, out, jobs, validate_only } => {
            let text = std::fs::read_to_string(&config).map_err(|e| {
                ness::Error::Config(format!("cannot read {}: {e}", config.display()))
            })?;
            let spec: RibbonSpec =
                serde_json::from_str(&text).map_err(|e| ness::Error::Config(e.to_string()))?;
            if validate_only {
                println!("{}", serde_json::to_string_pretty(&spec)?);
                return Ok(ExitCode::SUCCESS);
            }
            let raw = RunConfig {
                experiment: ExperimentKind::RibbonDemo,
                n_realizations: 1,
                seed: 0,
                ensemble: Default::default(),
                designed_ensemble: None,
                lambda_log_range: None,
                gamma_log_range: None,
                fixed_lambda: None,
                tolerances: Default::default(),
                output_path: out,
                max_failure_rate: None,
                ribbon: Some(spec),
                single: None,
            };
            let resolved = raw.resolve()?;
            let outcome = in_pool(jobs, || run(&resolved))?;
            finish(&resolved, outcome)
        }
    }
}

fn in_pool<T>(jobs: Option<usize>, f: impl FnOnce() -> ness::Result<T> + Send) -> ness::Result<T>
where
    T: Send,
{
    match jobs {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(|e| ness::Error::Config(format!("cannot build worker pool: {e}")))?;
            pool.install(f)
        }
        None => f(),
    }
}

fn finish(config: &ResolvedConfig, outcome: RunOutcome) -> ness::Result<ExitCode> {
    if let Some(csv) = &outcome.csv {
        std::fs::write(&config.output_path, csv)?;
    }
    if let Some(json) = &outcome.json {
        if config.experiment == ExperimentKind::SingleSystem {
            // stdout is the primary channel for single reports; the output
            // path is written as well when it was explicitly requested.
            println!("{json}");
            if config.output_path.as_os_str() != "single_system.json" {
                std::fs::write(&config.output_path, json)?;
            }
        }
    }
    eprintln!("{}", serde_json::to_string_pretty(&outcome.summary)?);
    Ok(ExitCode::from(outcome.exit_code(config.max_failure_rate)))
}
