use std::io;

use cqed_core::Error as CoreError;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("config: {0}")]
    Config(String),
    #[error("{0}")]
    Core(#[from] CoreError),
    #[error("io: {0}")]
    Io(#[from] io::Error),
    #[error("verification failed")]
    VerifyFailed,
}

impl CliError {
    pub fn config(msg: impl Into<String>) -> Self {
        CliError::Config(msg.into())
    }

    /// Process exit code: 2 config, 3 threshold, 4 convergence, 5 degenerate,
    /// 6 derivative mismatch, 1 failed verification or I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                CoreError::Threshold { .. } => 3,
                CoreError::Convergence { .. } => 4,
                CoreError::Degenerate { .. } => 5,
                CoreError::DerivativeMismatch { .. } => 6,
                CoreError::Domain { .. } | CoreError::InvalidInput(_) => 2,
            },
            CliError::Io(_) | CliError::VerifyFailed => 1,
        }
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(io::Error::other(e))
    }
}

pub type Result<T> = std::result::Result<T, CliError>;
