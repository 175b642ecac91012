use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{source_name}: {message}")]
    Parse { source_name: String, message: String },

    #[error(transparent)]
    Core(#[from] qbattery::Error),

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{}: {source}", path.display())]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{0}")]
    Usage(String),

    /// Some grid points failed; the rest of the sweep was written.
    #[error("{failed} of {total} grid points failed")]
    PartialSweep { failed: usize, total: usize },

    #[error("validation failed: {0}")]
    ChecksFailed(String),
}

impl CliError {
    /// 0 success, 1 validation or parse failure, 2 solver failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(qbattery::Error::SolverFailure { .. }) | CliError::PartialSweep { .. } => 2,
            _ => 1,
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io { path: path.into(), source }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
