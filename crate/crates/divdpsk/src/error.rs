use std::io;
use std::path::PathBuf;

use thiserror::Error;

/// Everything the command line can fail with.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error(transparent)]
    Model(#[from] divdpsk_core::Error),
    #[error("{}: {source}", path.display())]
    Read { path: PathBuf, source: io::Error },
    #[error("{0}")]
    Parse(String),
    #[error("writing output: {0}")]
    Output(String),
}

impl CliError {
    pub const CONFIG_EXIT: i32 = 2;
    pub const NON_CONVERGENCE_EXIT: i32 = 3;

    /// 2 for bad input of any kind, 3 when a numerical method did not
    /// converge, 1 when the output stream itself failed.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Model(divdpsk_core::Error::NoConvergence { .. }) => Self::NON_CONVERGENCE_EXIT,
            CliError::Output(_) => 1,
            _ => Self::CONFIG_EXIT,
        }
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Output(e.to_string())
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
