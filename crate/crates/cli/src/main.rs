//! `boundbell` command-line front end.

mod commands;
mod config;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::{Alpha, CliError};

#[derive(Debug, Parser)]
#[command(name = "boundbell", version, about = "Reports on bound entangled states that violate Bell inequalities")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write rho_N and its GHZ component as JSON files.
    State(StateArgs),
    /// Partial-transpose scan over bipartitions.
    Scan(ScanArgs),
    /// Mermin-Klyshko value of an operator.
    Bell(BellArgs),
    /// Extract a maximally entangled pair from a pure state.
    Extract(ExtractArgs),
    /// Bell value and PPT summary of rho_N over a range of N.
    Sweep(SweepArgs),
}

/// Source operator: `--input` file, or rho_N from `--n`/`--alpha`.
#[derive(Debug, Args)]
struct FamilyArgs {
    #[arg(long, conflicts_with = "input")]
    n: Option<usize>,
    /// Phase in radians, or `auto` for pi(N-1)/4.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    alpha: Alpha,
    /// Operator file (`{"dims", "entries"}`).
    #[arg(long)]
    input: Option<String>,
}

#[derive(Debug, Args)]
struct TolArg {
    /// PSD tolerance; defaults to $BOUNDBELL_TOL, then 1e-9.
    #[arg(long)]
    tol: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Args)]
struct StateArgs {
    #[arg(long)]
    n: usize,
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    alpha: Alpha,
    /// Operator file to write; the GHZ component goes next to it as `*.ghz.json`.
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct ScanArgs {
    #[command(flatten)]
    source: FamilyArgs,
    #[command(flatten)]
    tol: TolArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct BellArgs {
    #[command(flatten)]
    source: FamilyArgs,
    /// `xy`, `optimize`, or a settings file (`{"a", "a_prime"}`).
    #[arg(long, default_value = "xy")]
    settings: String,
    #[arg(long, default_value_t = 16)]
    restarts: usize,
    #[command(flatten)]
    tol: TolArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where `--settings optimize` writes the best settings.
    #[arg(long)]
    settings_out: Option<String>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct ExtractArgs {
    /// Pure-state file (`{"dims", "amps"}`).
    #[arg(long, conflicts_with_all = ["ghz", "random"])]
    input: Option<String>,
    /// GHZ state on this many qubits.
    #[arg(long, conflicts_with = "random")]
    ghz: Option<usize>,
    /// GHZ phase (only with `--ghz`).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    alpha: Alpha,
    /// Seeded random state with these local dimensions, e.g. `2,3,2`.
    #[arg(long, value_delimiter = ',')]
    random: Option<Vec<usize>>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Target pair `i,j`.
    #[arg(long, value_delimiter = ',', num_args = 1)]
    pair: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<String>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[arg(long, default_value_t = 2)]
    n_min: usize,
    #[arg(long, default_value_t = 12)]
    n_max: usize,
    /// Fixed phase for every N, or `auto` for pi(N-1)/4 per N.
    #[arg(long, default_value = "auto", allow_hyphen_values = true)]
    alpha: Alpha,
    #[command(flatten)]
    tol: TolArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    #[arg(long)]
    out: Option<String>,
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::State(a) => commands::state(a),
        Command::Scan(a) => commands::scan(a),
        Command::Bell(a) => commands::bell(a),
        Command::Extract(a) => commands::extract(a),
        Command::Sweep(a) => commands::sweep(a),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
