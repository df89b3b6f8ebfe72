//! `meshconflict`: topology generation, conflict graphs, channel assignment
//! and flow evaluation from the command line.
//!
//! Exit codes: 0 success, 2 usage error, 3 validation error, 4 budget
//! exceeded. `MESHCONFLICT_THREADS` caps the worker pool.

mod commands;
mod io;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use meshconflict::{CaError, EvalError, MmcgError, TopologyError};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error(transparent)]
    Eval(#[from] EvalError),
    #[error("{0}")]
    Budget(String),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.to_path_buf(),
            source,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Budget(_) | CliError::Eval(EvalError::CliqueBudgetExceeded { .. }) => 4,
            _ => 3,
        }
    }
}

impl From<TopologyError> for CliError {
    fn from(e: TopologyError) -> Self {
        CliError::Eval(e.into())
    }
}

impl From<MmcgError> for CliError {
    fn from(e: MmcgError) -> Self {
        CliError::Eval(e.into())
    }
}

impl From<CaError> for CliError {
    fn from(e: CaError) -> Self {
        CliError::Eval(e.into())
    }
}

#[derive(Parser)]
#[command(name = "meshconflict", version, about = "Conflict graphs and channel assignment for multi-radio mesh networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a grid topology file.
    Gen(commands::GenArgs),
    /// Build a conflict graph and report its total interference degree.
    Mmcg(commands::MmcgArgs),
    /// Default-channel TIDs of both builders over growing grids.
    Sweep(commands::SweepArgs),
    /// Run channel assignment schemes and report their TIDs.
    Assign(commands::AssignArgs),
    /// Schedule test-case flows over assignments and record throughput.
    Evaluate(commands::EvaluateArgs),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = meshconflict::experiment::threads_from_env();
    let result = meshconflict::par::with_threads(threads, || match cli.command {
        Command::Gen(a) => commands::gen(a),
        Command::Mmcg(a) => commands::mmcg(a),
        Command::Sweep(a) => commands::sweep(a),
        Command::Assign(a) => commands::assign(a),
        Command::Evaluate(a) => commands::evaluate(a),
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
