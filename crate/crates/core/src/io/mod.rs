//! Feeder files, run configuration, report formatting and the CLI commands.

mod commands;
mod config;
mod feeder;
mod report;

use std::path::{Path, PathBuf};

use thiserror::Error;

use crate::network::ValidationReport;

pub use commands::{
    front_recall, run_oracle, run_powerflow, run_reliability, run_solve, run_validate, SolveOptions,
    SolveSummary,
};
pub use config::{load_config, parse_config, RunConfig};
pub use feeder::{load_network, parse_network, save_network, to_feeder_json};
pub use report::{
    compromise_text, ens_csv, fmt_num, front_svg, generations_csv, losses_csv, pareto_csv, pareto_json,
    voltages_csv,
};

/// Failure of a command, carrying the process exit code it maps to.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: std::io::Error },
    #[error("{}: {source}", path.display())]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{}: {message}", path.display())]
    ConfigParse { path: PathBuf, message: String },
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message}", path.display())]
    FeederParse { path: PathBuf, message: String },
    #[error("{}: invalid network ({} violations)\n{report}", path.display(), report.len())]
    Invalid { path: PathBuf, report: ValidationReport },
    #[error("{0}")]
    Data(String),
    #[error("solver failure: {0}")]
    Solver(String),
}

impl IoError {
    /// 1 usage/config, 2 data/validation, 3 solver failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            IoError::ConfigParse { .. } | IoError::Config(_) | IoError::Usage(_) => 1,
            IoError::Read { .. }
            | IoError::FeederParse { .. }
            | IoError::Invalid { .. }
            | IoError::Data(_) => 2,
            IoError::Write { .. } | IoError::Solver(_) => 3,
        }
    }
}

fn read_text(path: &Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|source| IoError::Read { path: path.into(), source })
}
