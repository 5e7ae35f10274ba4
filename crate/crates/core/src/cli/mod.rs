//! The `scrambler` command-line front end.
//!
//! Every subcommand reads its options from flags, then from an optional JSON
//! config file (`--config`, keys named like the long flags in snake case),
//! then from defaults. CSV output is LF-terminated with a header row; floats
//! are printed in shortest round-trip form.

mod commands;
mod config;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

pub use commands::{run_sweep, sweep_csv, SweepConfig, SweepRow, SweepStrategy, SWEEP_CSV_HEADER};
pub use config::merge_config;

#[derive(Debug, Parser)]
#[command(name = "scrambler", version, about = "Hacking fidelity of bipartite quantum scramblers")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// ME, PG and optimal fidelities of one scrambler as a JSON report.
    Fidelity(InputArgs),
    /// Optimize the probe and print the optimal probe operator.
    Optimize(InputArgs),
    /// Monte Carlo averages over Haar scramblers on a grid of dimensions.
    Sweep(SweepArgs),
    /// Tabulate the asymptotic Haar-averaged optimal fidelity.
    Asym(AsymArgs),
    /// Simulate repeated extraction rounds.
    Rounds(RoundsArgs),
    /// Run the invariant suites and print a JSON summary.
    Verify(VerifyArgs),
    /// Print the rotated operator of a scrambler.
    Uo(InputArgs),
}

/// Scrambler selection and optimizer options shared by single-instance
/// commands. The black-hole fidelity is `fidelity` at dims `dM,DB,DB,dM`.
#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InputArgs {
    /// JSON matrix file holding U.
    #[arg(long)]
    pub input: Option<PathBuf>,
    /// Named scrambler: identity, swap, controlled_x or haar.
    #[arg(long)]
    pub family: Option<String>,
    /// Shorthand for `--family haar`.
    #[arg(long, num_args = 0, default_missing_value = "true")]
    pub haar: Option<bool>,
    /// Seed for Haar sampling: decimal, 0x-hex, optionally `seed:stream`.
    #[arg(long)]
    pub seed: Option<String>,
    /// Subsystem dimensions `dA,dB,dK,dL`.
    #[arg(long)]
    pub dims: Option<String>,
    /// fixed_point (default) or gradient_ascent.
    #[arg(long)]
    pub method: Option<String>,
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub max_iters: Option<usize>,
    #[arg(long)]
    pub step_eps: Option<f64>,
    /// Start the optimizer from a random probe with this seed instead of I.
    #[arg(long)]
    pub start_seed: Option<String>,
    /// `optimize` only: write the convergence trace CSV here.
    #[arg(long)]
    pub trace_out: Option<PathBuf>,
    /// Write output here instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing, default)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepArgs {
    /// Grid point `dA,dB,dK,dL`; repeat the flag or separate points with `;`.
    #[arg(long)]
    pub dims: Option<Vec<String>>,
    /// Haar scramblers per grid point.
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated subset of me,pg,opt,rand.
    #[arg(long)]
    pub strategies: Option<String>,
    #[arg(long)]
    pub seed: Option<String>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing, default)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AsymArgs {
    /// Comma-separated κ values.
    #[arg(long)]
    pub kappa: Option<String>,
    /// Comma-separated `dA:dK` pairs setting the finite-size term.
    #[arg(long)]
    pub da_dk: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing, default)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RoundsArgs {
    /// Infalling qudit dimension d_M.
    #[arg(long)]
    pub dm: Option<usize>,
    /// Interior (and probe) dimension D_B.
    #[arg(long)]
    pub db: Option<usize>,
    #[arg(long)]
    pub rounds: Option<usize>,
    /// Number of independent runs; run i uses stream i of the master seed.
    #[arg(long)]
    pub seeds: Option<u64>,
    #[arg(long)]
    pub seed: Option<String>,
    /// me_assumed (default) or pg_adaptive.
    #[arg(long)]
    pub strategy: Option<String>,
    /// Maximum archive dimension kept between rounds (default D_B²).
    #[arg(long)]
    pub compress_limit: Option<usize>,
    /// Degrade the first probe to this fidelity with the maximally entangled state.
    #[arg(long)]
    pub degrade_f: Option<f64>,
    /// haar (default) or swap.
    #[arg(long)]
    pub family: Option<String>,
    #[arg(long)]
    pub workers: Option<usize>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing, default)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VerifyArgs {
    /// bounds, oracle, duality, two-qubit, trade-off or moments; repeatable.
    /// All suites run when omitted.
    #[arg(long)]
    pub suite: Option<Vec<String>>,
    #[arg(long)]
    pub seed: Option<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    #[serde(skip_serializing, default)]
    pub config: Option<PathBuf>,
}

/// Result of one invocation: text for stdout (or `--out`) and an exit code.
#[derive(Debug)]
pub struct Outcome {
    pub output: String,
    pub exit_code: i32,
}

pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> crate::Result<Outcome>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = Cli::try_parse_from(args).map_err(|e| crate::HackError::Argument(e.to_string()))?;
    commands::dispatch(cli.command)
}

/// Binary entry point; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match commands::dispatch(cli.command) {
        Ok(outcome) => {
            print!("{}", outcome.output);
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
