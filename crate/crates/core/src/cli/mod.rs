//! `bigness-lab` command line: scenario parsing, dispatch and reports.
//!
//! Exit codes: `0` every check passed, `2` a mathematical invariant was
//! violated (the report is still written), `1` usage or solver error.

mod commands;
mod report;
mod scenario;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

pub use report::{append_summary, write_report, SummaryRow, CSV_HEADER, SCHEMA_VERSION};
pub use scenario::{DensitySpec, RandomGammas, Scenario, TrigMode};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "bigness-lab",
    version,
    about = "Bigness criterion and Monge-Ampere checks on flat complex tori"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one Monge-Ampere equation from a scenario file.
    SolveMa(Flags),
    /// Run the integral estimate (one epsilon) or an epsilon sweep.
    VerifyEstimate(Flags),
    /// Sample nef pairs and look for counterexamples to the criterion.
    CheckTheorem(Flags),
    /// Search for pairs showing the constant n cannot be lowered.
    SearchOptimality(Flags),
    /// Fuzz the trace-product inequality on random metric triples.
    FuzzTraces(Flags),
    /// Sampled dual test of pseudo-effectivity for a constant form.
    DualTest(Flags),
}

/// Flags shared by every subcommand; each uses the ones it needs.
#[derive(Debug, Clone, Args)]
pub struct Flags {
    #[arg(long)]
    pub scenario: Option<PathBuf>,
    /// Complex dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Grid points per real axis.
    #[arg(long)]
    pub grid: Option<usize>,
    /// Comma-separated epsilon values.
    #[arg(long, value_delimiter = ',')]
    pub eps: Option<Vec<f64>>,
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory for report.json and summary.csv.
    #[arg(long, default_value = "bigness-out")]
    pub out: PathBuf,
    /// Monge-Ampere residual tolerance.
    #[arg(long)]
    pub tol: Option<f64>,
    /// Constant replacing n in the criterion (search-optimality).
    #[arg(long)]
    pub c: Option<f64>,
}

/// Parses `argv` (including the program name), runs the command and returns the exit code.
pub fn run_cli<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
        }
    };
    let outcome = match cli.command {
        Command::SolveMa(f) => commands::solve_ma(&f),
        Command::VerifyEstimate(f) => commands::verify_estimate(&f),
        Command::CheckTheorem(f) => commands::check_theorem(&f),
        Command::SearchOptimality(f) => commands::search_optimality(&f),
        Command::FuzzTraces(f) => commands::fuzz_traces(&f),
        Command::DualTest(f) => commands::dual_test(&f),
    };
    match outcome {
        Ok(true) => EXIT_OK,
        Ok(false) => EXIT_VIOLATION,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_ERROR
        }
    }
}
