//! Command-line front end for building and verifying wavelet filter banks.

pub mod bankfile;
pub mod bundled;
pub mod commands;
pub mod config;

use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{execute, Outcome, SubcommandKind};
pub use config::{Overrides, RunConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<tightframe::Error> for CliError {
    fn from(e: tightframe::Error) -> Self {
        CliError::Precondition(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => 2,
            CliError::Precondition(_) | CliError::Io(_) => 3,
        }
    }
}

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;

#[derive(Debug, Parser)]
#[command(name = "tightframe", version, about = "Build and verify Parseval wavelet frames from refinable masks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Grid points per axis for filter checks.
    #[arg(long, global = true)]
    pub grid: Option<usize>,
    /// Tolerance applied to the checks of the chosen subcommand.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Depth of the truncated infinite product.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    /// Inclusive scale range such as -25..25.
    #[arg(long, global = true, allow_hyphen_values = true, value_parser = config::parse_range)]
    pub range: Option<(i32, i32)>,
    /// Directory for reports and CSV files.
    #[arg(long, global = true, default_value = ".")]
    pub out: PathBuf,
    /// JSON run configuration; command-line flags take precedence.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Unitary extension conditions on the grid.
    VerifyUep { bank: PathBuf },
    /// Oblique extension conditions; the bank must carry a weight.
    VerifyOep { bank: PathBuf },
    /// Framelet profiles and the multiresolution admissibility probe.
    BuildFramelet { bank: PathBuf },
    /// Complete the lowpass filter to a unitary bank.
    Complete { bank: PathBuf },
    /// Frame bounds of the scaling translates from the bracket product.
    FrameBounds { bank: PathBuf },
    /// Truncated Calderón and cross sums.
    Calderon { bank: PathBuf },
    /// Two-scale energy identity on seeded band-limited signals.
    TwoScale { bank: PathBuf },
    /// Density probe of the scaling function at the origin.
    DensityProbe { bank: PathBuf },
    /// Approximate-continuity counterexample table.
    Counterexample {
        /// Levels, such as 1..6.
        #[arg(long = "j", value_parser = config::parse_range)]
        j: Option<(i32, i32)>,
    },
    /// Write the bundled banks; with --selftest run their expected-verdict matrix.
    Examples {
        #[arg(long)]
        selftest: bool,
    },
}

/// Parses arguments and runs; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return code;
        }
    };
    match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli) -> Result<i32, CliError> {
    let mut config = match &cli.config {
        Some(p) => RunConfig::read(p)?,
        None => RunConfig::default(),
    };
    config.apply(&Overrides {
        grid: cli.grid,
        tol: cli.tol,
        seed: cli.seed,
        depth: cli.depth,
        range: cli.range,
    });
    std::fs::create_dir_all(&cli.out).map_err(|e| CliError::Io(format!("{}: {e}", cli.out.display())))?;
    let (kind, bank) = match cli.command {
        Command::VerifyUep { bank } => (SubcommandKind::VerifyUep, Some(bank)),
        Command::VerifyOep { bank } => (SubcommandKind::VerifyOep, Some(bank)),
        Command::BuildFramelet { bank } => (SubcommandKind::BuildFramelet, Some(bank)),
        Command::Complete { bank } => (SubcommandKind::Complete, Some(bank)),
        Command::FrameBounds { bank } => (SubcommandKind::FrameBounds, Some(bank)),
        Command::Calderon { bank } => (SubcommandKind::Calderon, Some(bank)),
        Command::TwoScale { bank } => (SubcommandKind::TwoScale, Some(bank)),
        Command::DensityProbe { bank } => (SubcommandKind::DensityProbe, Some(bank)),
        Command::Counterexample { j } => {
            if let Some((a, b)) = j {
                if a < 0 {
                    return Err(CliError::Precondition(format!("counterexample levels must be >= 0, got {a}")));
                }
                config.counterexample_j = (a as u32, b as u32);
            }
            (SubcommandKind::Counterexample, None)
        }
        Command::Examples { selftest } => return commands::examples(&cli.out, selftest, &config),
    };
    let outcome = execute(kind, bank.as_deref(), &config, &cli.out)?;
    Ok(outcome.exit_code())
}
