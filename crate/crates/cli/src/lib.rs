//! Command-line front end for the secrecy rate regions in `marcwt-core`.
//!
//! Each subcommand is a plain function here so that tests and other tools can
//! drive it without spawning a process; `main.rs` only parses arguments and
//! maps [`CliError`] to an exit status.

use std::fmt;
use std::path::PathBuf;

pub mod commands;
pub mod config;
pub mod output;
pub mod report;

pub use commands::{cmd_compare, cmd_dm, cmd_figure, cmd_gauss, CompareReport, FigureRun};
pub use config::{Grids, Preset, ScenarioConfig, Strategy};
pub use report::{evaluate, Report, StrategyOutput};

/// A failed command, classified by the exit status it maps to.
#[derive(Debug)]
pub enum CliError {
    Io { path: PathBuf, source: std::io::Error },
    Invalid(String),
    NotApplicable(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io { .. } => 1,
            CliError::Invalid(_) => 2,
            CliError::NotApplicable(_) => 3,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Io { path, source } => write!(f, "{}: {source}", path.display()),
            CliError::Invalid(msg) => write!(f, "invalid input: {msg}"),
            CliError::NotApplicable(msg) => write!(f, "{msg}"),
        }
    }
}

impl std::error::Error for CliError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            CliError::Io { source, .. } => Some(source),
            _ => None,
        }
    }
}

impl From<marcwt_core::Error> for CliError {
    fn from(e: marcwt_core::Error) -> Self {
        match e {
            marcwt_core::Error::NotApplicable(_) => CliError::NotApplicable(e.to_string()),
            other => CliError::Invalid(other.to_string()),
        }
    }
}
