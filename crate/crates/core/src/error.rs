use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },

    #[error("symmetric eigensolver did not converge (off-diagonal residual {residual:e})")]
    EigenNoConvergence { residual: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("index {index} out of range for {len} measurements")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("explicit corruption is nonzero at index {index}, outside the declared support")]
    CorruptionOffSupport { index: usize },

    #[error("zero signal: the tangent space and dual certificate are undefined for x0 = 0")]
    ZeroSignal,

    #[error("ragged grid: {0}")]
    RaggedGrid(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
