use std::io;
use std::path::PathBuf;

use newton_lab::LabError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid parameters: {0}")]
    Validation(String),
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("cache {path}: {detail}")]
    Cache { path: PathBuf, detail: String },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
}

pub type Result<T> = std::result::Result<T, CliError>;

/// Exit code for a run that found counterexamples.
pub const EXIT_COUNTEREXAMPLE: i32 = 3;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation(_) | CliError::Json { .. } => 2,
            CliError::Lab(e) => match e {
                LabError::GuardExceeded { .. }
                | LabError::Precision(_)
                | LabError::Truncation(_) => 4,
                LabError::NotPrime(_)
                | LabError::InvalidShape(_)
                | LabError::PrimeDividesD { .. }
                | LabError::OutOfRange(_)
                | LabError::LengthMismatch { .. }
                | LabError::Degenerate(_)
                | LabError::Invalid(_) => 2,
                _ => 1,
            },
            CliError::Cache { .. } | CliError::Io { .. } => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>) -> impl FnOnce(io::Error) -> CliError {
        let path = path.into();
        move |source| CliError::Io { path, source }
    }
}
