//! `lyapctl`: Lyapunov and Stein domination checks from problem files.
//!
//! Exit codes: 0 dominates (or success), 1 not dominated (or an oracle
//! violation), 2 marginal, 64 input error, 70 numerical failure.

pub mod commands;
pub mod error;
pub mod input;
pub mod output;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use error::{CliError, EXIT_COMPUTE, EXIT_INPUT};

#[derive(Debug, Parser)]
#[command(name = "lyapctl", version, about = "Decide Lyapunov domination for B in the bicommutant of A")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decide whether B dominates A.
    Check {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        oracle_trials: usize,
        #[arg(long, value_enum, default_value_t = Order::Lyapunov)]
        order: Order,
        #[command(flatten)]
        common: Common,
    },
    /// Print the Hill-Pick matrix and its index set.
    HillPick {
        file: PathBuf,
        #[command(flatten)]
        common: Common,
    },
    /// Print a Hill representation of an order map or of a raw map.
    Hill {
        file: PathBuf,
        #[arg(long, value_enum, default_value_t = MapKind::Lyapunov)]
        map: MapKind,
        /// Minimal representation from a greedy block choice (the default).
        #[arg(long, conflicts_with = "selection")]
        minimal: bool,
        /// Zero-based blocks `i,j;k,l;...` for the pinned construction.
        #[arg(long)]
        selection: Option<String>,
        #[command(flatten)]
        common: Common,
    },
    /// Run only the sampling oracle.
    Verify {
        file: PathBuf,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, value_enum, default_value_t = Order::Lyapunov)]
        order: Order,
        #[command(flatten)]
        common: Common,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Order {
    Lyapunov,
    Stein,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum MapKind {
    Lyapunov,
    Stein,
    Raw,
}

#[derive(Clone, Debug, Default, Args)]
pub struct Common {
    /// Overrides the seed in the file (default 0).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub tol_psd: Option<f64>,
    #[arg(long)]
    pub tol_rank: Option<f64>,
    #[arg(long)]
    pub tol_eq: Option<f64>,
    #[arg(long)]
    pub json: bool,
    /// Significant digits in text output.
    #[arg(long, default_value_t = 12)]
    pub precision: usize,
    #[arg(short, long)]
    pub verbose: bool,
}

/// What a command prints and the status it exits with.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

pub fn run(cli: &Cli) -> Result<Outcome, CliError> {
    match &cli.command {
        Command::Check {
            file,
            oracle_trials,
            order,
            common,
        } => commands::check(file, *oracle_trials, *order, common),
        Command::HillPick { file, common } => commands::hill_pick(file, common),
        Command::Hill {
            file,
            map,
            selection,
            common,
            ..
        } => commands::hill(file, *map, selection.as_deref(), common),
        Command::Verify {
            file,
            trials,
            order,
            common,
        } => commands::verify(file, *trials, *order, common),
    }
}
