use std::path::PathBuf;

use pricecast_classical::ClassicalError;
use pricecast_lstm::LstmError;
use thiserror::Error;

pub type Result<T, E = ExperimentError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum ExperimentError {
    #[error("usage: {0}")]
    Usage(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {message}")]
    Config { path: PathBuf, message: String },

    #[error(transparent)]
    Data(#[from] pricecast_core::Error),

    #[error(transparent)]
    Lstm(#[from] LstmError),

    #[error(transparent)]
    Classical(#[from] ClassicalError),

    #[error("model file {path}: {message}")]
    ModelFile { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("cell {cell}: {source}")]
    Cell {
        cell: String,
        #[source]
        source: Box<ExperimentError>,
    },
}

impl ExperimentError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Self::Io { path: path.into(), source }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Self::Csv { path: path.into(), source }
    }

    /// Process exit status: 1 usage, 2 data, 3 model or training.
    pub fn exit_code(&self) -> i32 {
        match self {
            Self::Usage(_) | Self::InvalidParameter(_) => 1,
            Self::Config { .. } | Self::Data(_) | Self::Io { .. } | Self::Csv { .. } => 2,
            Self::Lstm(LstmError::Core(_)) | Self::Classical(ClassicalError::Core(_)) => 2,
            Self::Lstm(_) | Self::Classical(_) | Self::ModelFile { .. } => 3,
            Self::Cell { source, .. } => source.exit_code(),
        }
    }
}
