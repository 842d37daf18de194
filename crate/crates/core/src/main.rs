use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use fivequdit::cli::{run, CliError, Command, OutputFormat, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "fivequdit",
    version,
    about = "Five-register qudit error-correcting code toolkit"
)]
struct Args {
    #[command(subcommand)]
    command: Cmd,

    /// Qudit dimension.
    #[arg(long, global = true, default_value_t = 2)]
    n: usize,

    /// Logical index for `encode`.
    #[arg(long, global = true, default_value_t = 0)]
    k: usize,

    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,

    /// Trials for `simulate`, candidates for `optimality`.
    #[arg(long, global = true, default_value_t = 100)]
    trials: usize,

    /// State comparison tolerance (0 < tol < 1e-6).
    #[arg(long, global = true)]
    tol: Option<f64>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Omit timing fields so reports are byte-identical across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// Permit n = 6..=8.
    #[arg(long, global = true)]
    allow_large_n: bool,
}

#[derive(Debug, Clone, Copy, Subcommand)]
enum Cmd {
    /// Print the amplitudes of one codeword.
    Encode,
    /// Check the error-correction conditions over all single-register Paulis.
    Verify,
    /// Compare the gate-level encoder with the codeword formula.
    CircuitCheck,
    /// Decode randomly corrupted logical states.
    Simulate,
    /// Search random four-register codes for a counterexample.
    Optimality,
    /// Run everything for n = 2..=5.
    ReportAll,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Text,
}

fn main() -> ExitCode {
    let args = Args::parse();
    let config = RunConfig {
        command: match args.command {
            Cmd::Encode => Command::Encode,
            Cmd::Verify => Command::Verify,
            Cmd::CircuitCheck => Command::CircuitCheck,
            Cmd::Simulate => Command::Simulate,
            Cmd::Optimality => Command::Optimality,
            Cmd::ReportAll => Command::ReportAll,
        },
        n: args.n,
        k: args.k,
        seed: args.seed,
        trials: args.trials,
        tol: args.tol,
        format: match args.format {
            Format::Json => OutputFormat::Json,
            Format::Text => OutputFormat::Text,
        },
        timestamp: !args.no_timestamp,
        allow_large_n: args.allow_large_n,
    };
    match config.validate() {
        Ok(warnings) => {
            for w in warnings {
                eprintln!("warning: {w}");
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let outcome = match run(&config) {
        Ok(o) => o,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match &args.out {
        Some(path) => {
            if let Err(e) = fs::write(path, &outcome.output) {
                eprintln!("error: cannot write {}: {e}", path.display());
                return ExitCode::from(1);
            }
        }
        None => print!("{}", outcome.output),
    }
    if outcome.ok {
        ExitCode::SUCCESS
    } else {
        for record in &outcome.offending {
            eprintln!("threshold violated: {record}");
        }
        ExitCode::from(1)
    }
}
