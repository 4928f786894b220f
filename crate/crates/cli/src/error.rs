use std::path::PathBuf;

use ktc_core::KtcError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Input(String),

    #[error(transparent)]
    Solver(#[from] KtcError),
}

impl CliError {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    /// 2 for bad input, 3 when a size-limited solver refuses, 4 for an
    /// internal failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse { .. } | CliError::Input(_) => 2,
            CliError::Solver(e) if e.is_capability_refusal() => 3,
            CliError::Solver(e) => match e.root() {
                KtcError::InvalidIndex { .. }
                | KtcError::InvalidCapacity
                | KtcError::NonFiniteCoordinate { .. }
                | KtcError::InvalidEpsilon(_)
                | KtcError::NonPositiveRadius(_) => 2,
                _ => 4,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
