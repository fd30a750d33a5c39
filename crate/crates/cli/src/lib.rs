//! Command-line driver for the finite-cutoff Gibbs measure experiments:
//! configuration, orchestration, persistence and plotting.

pub mod commands;
pub mod config;
pub mod error;
pub mod record;

use clap::{Parser, Subcommand, ValueEnum};
use config::ExperimentConfig;
use error::{CliError, Result, EXIT_INVARIANT, EXIT_PASS};
use gibbs_core::free_energy::ParameterMode;
use std::path::PathBuf;

/// Environment variable overriding the number of worker threads.
pub const THREADS_ENV: &str = "GIBBS_THREADS";

#[derive(Debug, Parser)]
#[command(name = "gibbs", version, about = "Quantum and classical Gibbs measure experiments on the torus")]
pub struct Cli {
    /// TOML configuration file; defaults apply to every missing key.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Overrides the configured seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory; overrides the configured one.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Overrides the configured parameter mode.
    #[arg(long, global = true)]
    pub mode: Option<ModeArg>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ModeArg {
    Theorem,
    Exploratory,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Quantum against classical relative free energy on a fixed mode set.
    Compare,
    /// Run invariant suites: spectral, classical, quantum, semiclassics or all.
    Verify {
        #[arg(default_value = "all")]
        suite: String,
    },
    /// Render SVG charts of a run record.
    Plot {
        /// JSON run record written by compare or scan-classical.
        run: PathBuf,
    },
    /// Joint cutoff/range scan of the classical free energy.
    ScanClassical,
    /// Lower symbol of the free Gibbs state against its closed form.
    Husimi,
    /// De Finetti moment identity and bound.
    Definetti,
    /// Both Berezin–Lieb inequalities for one mode.
    Berezin,
}

/// Configuration with command-line overrides applied.
pub fn resolve_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut config = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.seed = seed;
    }
    if let Some(out) = &cli.out {
        config.output_dir = out.clone();
    }
    if let Some(mode) = cli.mode {
        config.mode = match mode {
            ModeArg::Theorem => ParameterMode::Theorem,
            ModeArg::Exploratory => ParameterMode::Exploratory,
        };
    }
    Ok(config)
}

/// Size the global worker pool from [`THREADS_ENV`] when it is set.
pub fn configure_threads() -> Result<()> {
    let Ok(value) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = value
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| CliError::Config(format!("{THREADS_ENV} = {value:?} is not a positive integer")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| CliError::Config(format!("cannot size the worker pool: {e}")))
}

fn print_checks(run: &record::RunResult) {
    for c in &run.checks {
        println!(
            "{} {:<13} {:<48} value {:.3e} bound {:.3e}  {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.suite,
            c.name,
            c.value,
            c.bound,
            c.detail
        );
    }
    println!("{} passed, {} failed", run.checks.len() - run.failed_checks(), run.failed_checks());
}

fn print_points(run: &record::RunResult) {
    println!(
        "{:>8} {:>10} {:>6} {:>14} {:>14} {:>11} {:>11} {:>11}",
        "lambda", "epsilon", "K", "quantum", "classical", "std_error", "gap", "gap_se"
    );
    for r in &run.records {
        let q = r.quantum.map_or_else(|| "-".to_string(), |q| format!("{q:.6e}"));
        println!(
            "{:>8} {:>10.6} {:>6} {:>14} {:>14.6e} {:>11.3e} {:>11.3e} {:>11.3e}",
            r.lambda, r.epsilon, r.modes, q, r.classical, r.classical_std_error, r.gap, r.gap_std_error
        );
    }
}

/// Execute a parsed command line and return the process exit code.
pub fn execute(cli: &Cli) -> Result<i32> {
    let config = resolve_config(cli)?;
    let run = match &cli.command {
        Command::Plot { run } => {
            let dir = cli.out.clone().unwrap_or_else(|| run.parent().map(PathBuf::from).unwrap_or_default());
            for path in commands::plot::run(run, &dir)? {
                println!("wrote {}", path.display());
            }
            return Ok(EXIT_PASS);
        }
        Command::Compare => commands::compare::run(&config)?,
        Command::ScanClassical => commands::scan::run(&config)?,
        Command::Verify { suite } => commands::verify::run(&config, suite.parse()?)?,
        Command::Husimi => commands::semiclassics::run_husimi(&config)?,
        Command::Definetti => commands::semiclassics::run_definetti(&config)?,
        Command::Berezin => commands::semiclassics::run_berezin(&config)?,
    };
    for w in &run.warnings {
        eprintln!("warning: {w}");
    }
    if run.records.is_empty() {
        print_checks(&run);
    } else {
        print_points(&run);
    }
    for path in run.persist(&config.output_dir)? {
        println!("wrote {}", path.display());
    }
    Ok(if run.failed_checks() > 0 { EXIT_INVARIANT } else { EXIT_PASS })
}
