use std::io;

use thiserror::Error;

/// Errors produced anywhere in the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: probability {value} is outside [0, 1]")]
    ProbabilityRange { line: usize, value: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("capacity exceeded: {0}")]
    Capacity(String),

    #[error("invalid state: {0}")]
    State(String),

    #[error("structural audit failed: {0}")]
    Audit(String),

    #[error(transparent)]
    Io(#[from] io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Capacity(_) => 3,
            Error::Io(_) | Error::Csv(_) => 4,
            _ => 2,
        }
    }
}
