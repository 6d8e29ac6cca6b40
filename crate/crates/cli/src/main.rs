//! `renyi`: compute divergences, scans and n-copy tables for pairs of states
//! stored as JSON, and run the invariant suite.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(name = "renyi", version, about = "Quantum Rényi divergences and test-measured exponents")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Options shared by the commands that read a pair of states.
#[derive(Debug, Args)]
struct PairArgs {
    /// State files for ρ and σ, in that order.
    #[arg(long = "input", required = true, num_args = 1)]
    inputs: Vec<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Debug, Args)]
struct OptimizerArgs {
    /// Random restarts of the test / measurement optimizers.
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Algorithm for the regularized test-measured divergence.
    #[arg(long, default_value = "both")]
    method: String,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// One row per family and α.
    Compute {
        #[command(flatten)]
        pair: PairArgs,
        /// Families (comma-separated) or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        family: Vec<String>,
        /// α values (comma-separated).
        #[arg(long, value_delimiter = ',', default_value = "0.5")]
        alpha: Vec<f64>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// α-scan of all α families, or a Hoeffding r-scan.
    Scan {
        #[command(flatten)]
        pair: PairArgs,
        /// lo:hi:points, within (0, 1).
        #[arg(long, conflicts_with = "r_grid")]
        alpha_grid: Option<String>,
        /// lo:hi:points; `d0` and `d` stand for D₀ and D(ρ‖σ).
        #[arg(long)]
        r_grid: Option<String>,
        /// Families for the α-scan (comma-separated) or `all`.
        #[arg(long, value_delimiter = ',', default_value = "all")]
        family: Vec<String>,
        #[command(flatten)]
        opt: OptimizerArgs,
    },
    /// Per-copy test-measured values of a classical pair and the gap report.
    Ncopy {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long, default_value_t = 0.5)]
        alpha: f64,
        #[arg(long, default_value_t = 4)]
        n_max: usize,
    },
    /// Run the seeded invariant suite.
    Verify {
        #[arg(long, default_value_t = 42)]
        seed: u64,
        /// Dimensions cycled through by the random instances.
        #[arg(long, value_delimiter = ',', default_value = "2,3")]
        dims: Vec<usize>,
        #[arg(long, default_value_t = 20)]
        trials: usize,
        /// Only these check ids (comma-separated).
        #[arg(long, value_delimiter = ',')]
        only: Vec<String>,
        /// List the check ids and exit.
        #[arg(long)]
        list: bool,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
    /// Error probabilities of the Hoeffding test on n copies.
    HoeffdingTest {
        #[command(flatten)]
        pair: PairArgs,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        r: f64,
        #[arg(long)]
        alpha: f64,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
