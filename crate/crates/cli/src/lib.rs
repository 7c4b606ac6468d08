//! Harness behind the `efset` binary: build, query, verify, space and bench.
//!
//! Exit codes: 0 success, 1 divergence from the oracle, 2 invalid input,
//! 3 I/O failure.

use std::fmt;
use std::io::Write;

pub mod args;
pub mod commands;
pub mod input;
pub mod record;
pub mod structure;
pub mod workload;

pub use args::Cli;
pub use record::BenchRecord;
pub use workload::{Distribution, Op, OpMix, Workload};

#[derive(Debug)]
pub enum CliError {
    /// The structure disagreed with the oracle or failed its audit.
    Divergence(String),
    /// Malformed input, flags or tape.
    Invalid(String),
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Divergence(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Divergence(m) => write!(f, "divergence: {m}"),
            CliError::Invalid(m) => write!(f, "invalid input: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<efset::Error> for CliError {
    fn from(e: efset::Error) -> Self {
        match e {
            efset::Error::Io(e) => CliError::Io(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

/// Runs a parsed command line, writing reports to `out`.
pub fn run(cli: Cli, out: &mut dyn Write) -> CliResult<()> {
    match cli.command {
        args::Command::Build(a) => commands::build(&a, out),
        args::Command::Query(a) => commands::query(&a, out),
        args::Command::Verify(a) => commands::verify(&a, out),
        args::Command::Space(a) => commands::space(&a, out),
        args::Command::Bench(a) => commands::bench(&a, out),
    }
}
