//! `mns`: exact multiplicative nested sums from the command line.
//!
//! Exit codes: 0 success, 1 an identity check came out unequal (or an eigen
//! request hit duplicate eigenvalues), 2 bad arguments.

mod commands;

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "mns", version, about = "Exact multiplicative nested sums via index-matrix products")]
pub struct Cli {
    /// Output format; each command has its own default.
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// RNG seed for randomized verification and Monte Carlo.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Write output here instead of stdout.
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
    Plain,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModeArg {
    Weak,
    Strict,
}

#[derive(Debug, Args)]
pub struct FactorArgs {
    /// Harmonic indices: factor i is n -> sgn(i)^n / n^|i|.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub indices: Vec<i64>,
    /// File with one rational per line; repeat for several factors (after any --indices).
    #[arg(long = "factor-file")]
    pub factor_files: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModeArg::Weak)]
    pub mode: ModeArg,
    /// Upper bound N.
    #[arg(long = "N")]
    pub n: i64,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one nested sum S (weak) or A (strict).
    Sum {
        #[command(flatten)]
        factors: FactorArgs,
        /// Lower bound m.
        #[arg(long, default_value_t = 1)]
        m: i64,
        /// Also print the full table of sums for every (i, j).
        #[arg(long)]
        table: bool,
        /// Cross-check against brute-force enumeration.
        #[arg(long)]
        bruteforce: bool,
        /// Tuple limit for --bruteforce.
        #[arg(long, default_value_t = 10_000_000)]
        guard: u128,
    },
    /// Every nested sum with bounds 1 <= j <= i <= N at once.
    Table {
        #[command(flatten)]
        factors: FactorArgs,
    },
    /// Check an identity exactly; exits 1 if any instance is unequal.
    Verify(commands::VerifyArgs),
    /// Absorption probability of the leftward walk: exact and Monte Carlo.
    Walk {
        #[arg(long = "N")]
        n: i64,
        #[arg(long, default_value_t = 1)]
        a: u32,
        #[arg(long)]
        k: u32,
        #[arg(long, default_value_t = 1_000_000)]
        samples: u64,
    },
    /// Running double-precision values of S(1/x^e1, ..., 1/x^ek; N, 1).
    Converge {
        #[arg(long, value_delimiter = ',', required = true)]
        exponents: Vec<u32>,
        #[arg(long = "N")]
        n: i64,
        /// First geometric checkpoint; later ones double until N.
        #[arg(long, default_value_t = 1)]
        start: usize,
    },
    /// Closed-form eigendecomposition of S_a.
    Eigen {
        /// Comma-separated rationals a_1..a_N.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        a: Vec<String>,
        /// Also emit S_a^k computed through the diagonalization.
        #[arg(long)]
        power: Option<u32>,
    },
    /// Bidiagonal inverse of S_a.
    Inverse {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        a: Vec<String>,
    },
}

/// How a command failed.
#[derive(Debug)]
pub enum Failure {
    /// Bad arguments; exit 2.
    Usage(String),
    /// The computation ran but a check failed; exit 1.
    Check(String),
}

impl From<mns_core::Error> for Failure {
    fn from(e: mns_core::Error) -> Self {
        match e {
            mns_core::Error::DuplicateEntries { .. } => Failure::Check(e.to_string()),
            other => Failure::Usage(other.to_string()),
        }
    }
}

/// Text to emit and whether every check in it passed.
pub struct Emission {
    pub text: String,
    pub passed: bool,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    let result = commands::run(&cli);
    match result {
        Ok(emission) => {
            if let Err(e) = write_out(&cli, &emission.text) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if emission.passed {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: identity check failed");
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}\n\nFor usage, try '--help'.");
            ExitCode::from(2)
        }
        Err(Failure::Check(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn write_out(cli: &Cli, text: &str) -> io::Result<()> {
    match &cli.output {
        Some(path) => fs::write(path, text),
        None => io::stdout().lock().write_all(text.as_bytes()),
    }
}
