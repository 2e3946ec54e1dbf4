//! `modham`: experiment runner for symplectic Euler, modified Hamiltonians and
//! alternating mirror descent.
//!
//! Exit codes: 0 pass, 1 assertion or runtime failure, 2 configuration error.

mod commands;
mod config;
mod report;
mod svg;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context as _, Result};
use clap::{Parser, Subcommand};

use crate::config::{ConfigError, Loaded};

#[derive(Parser, Debug)]
#[command(name = "modham", version, about = "Modified-Hamiltonian and mirror-descent experiments")]
struct Cli {
    /// Experiment config (TOML).
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory, created if missing.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Overrides the config seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Worker threads for grid runs (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run an integrator and record trajectory and truncated-MH traces.
    Simulate,
    /// Fit conservation-error slopes against the step size for each truncation order.
    OrderSweep,
    /// Check exact cancellation of the Ω-coefficient diagonals.
    CancelVerify {
        #[arg(long, default_value_t = 5)]
        max_order: usize,
        /// Allow orders above 5.
        #[arg(long)]
        best_effort: bool,
        /// Wall-clock budget in seconds; a partial table is printed when it runs out.
        #[arg(long, default_value_t = 300)]
        time_budget: u64,
    },
    /// Print the exact Φ(N) table.
    Phi {
        #[arg(long, default_value_t = 5)]
        max_order: usize,
    },
    /// Regret and duality gap of alternating mirror descent over a grid of horizons.
    Regret,
    /// Tabulate the quadratic T-function.
    QuadMh,
    /// Orbit clouds of power Hamiltonians at η = 1.
    ExamplesFig,
    /// Check the exact combinatorial identities and bounds.
    CombinatoricsVerify,
}

/// A check the experiment asserts did not hold.
#[derive(Debug)]
pub struct AssertionFailed(pub String);

impl std::fmt::Display for AssertionFailed {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for AssertionFailed {}

/// Shared command state.
pub struct Context {
    pub out: PathBuf,
    pub config: Option<Loaded>,
    pub seed: Option<u64>,
}

impl Context {
    pub fn config(&self) -> Result<&Loaded> {
        self.config.as_ref().ok_or_else(|| ConfigError("this command needs --config".into()).into())
    }

    /// Hash of the config, or of the command line when there is none.
    pub fn hash(&self, fallback: &str) -> String {
        match &self.config {
            Some(c) => c.hash.clone(),
            None => config::short_hash(format!("{fallback};seed={:?}", self.seed).as_bytes()),
        }
    }

    pub fn path(&self, name: &str) -> PathBuf {
        self.out.join(name)
    }
}

fn run(cli: Cli) -> Result<()> {
    if let Some(jobs) = cli.jobs {
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs.max(1))
            .build_global()
            .context("configuring the worker pool")?;
    }
    let config = cli.config.as_deref().map(|p: &Path| config::load(p, cli.seed)).transpose()?;
    std::fs::create_dir_all(&cli.out).with_context(|| format!("creating {}", cli.out.display()))?;
    let ctx = Context { out: cli.out, config, seed: cli.seed };
    match cli.command {
        Command::Simulate => commands::simulate::run(&ctx),
        Command::OrderSweep => commands::order_sweep::run(&ctx),
        Command::CancelVerify { max_order, best_effort, time_budget } => {
            commands::symbolic::cancel_verify(&ctx, max_order, best_effort, time_budget)
        }
        Command::Phi { max_order } => commands::symbolic::phi(&ctx, max_order),
        Command::Regret => commands::regret::run(&ctx),
        Command::QuadMh => commands::quad_mh::run(&ctx),
        Command::ExamplesFig => commands::examples_fig::run(&ctx),
        Command::CombinatoricsVerify => commands::combinatorics::run(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<ConfigError>().is_some() => {
            eprintln!("config error: {e:#}");
            ExitCode::from(2)
        }
        Err(e) if e.downcast_ref::<AssertionFailed>().is_some() => {
            eprintln!("FAILED: {e:#}");
            ExitCode::from(1)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
