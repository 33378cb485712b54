use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("query syntax error at byte {offset}: {message}")]
    QuerySyntax { offset: usize, message: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("series has zero variance")]
    ZeroVariance,

    #[error("tweet {0} has no sentiment probabilities")]
    Unscored(String),

    #[error("SMO did not converge after {iterations} iterations (max violation {violation:e})")]
    NotConverged { iterations: usize, violation: f64 },

    #[error("no data: {0}")]
    NoData(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("model has no Platt calibration")]
    MissingCalibration,

    #[error("unsupported {kind} format version {found} (expected {expected})")]
    UnsupportedVersion {
        kind: &'static str,
        found: u32,
        expected: u32,
    },

    #[error("corrupt {kind}: {message}")]
    Corrupt { kind: &'static str, message: String },

    #[error("partition {0} is locked by another writer")]
    Locked(PathBuf),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(message: impl Into<String>) -> Self {
        Error::InvalidArgument(message.into())
    }

    /// True when the failure was caused by the caller's input rather than by
    /// the environment or a numerical breakdown.
    pub fn is_input_error(&self) -> bool {
        match self {
            Error::QuerySyntax { .. }
            | Error::InvalidArgument(_)
            | Error::DimensionMismatch { .. }
            | Error::Unscored(_)
            | Error::NoData(_)
            | Error::Degenerate(_)
            | Error::MissingCalibration
            | Error::UnsupportedVersion { .. }
            | Error::Corrupt { .. }
            | Error::Csv(_)
            | Error::Json(_) => true,
            Error::Io { source, .. } => matches!(
                source.kind(),
                std::io::ErrorKind::NotFound | std::io::ErrorKind::PermissionDenied
            ),
            Error::ZeroVariance | Error::NotConverged { .. } | Error::Locked(_) => false,
        }
    }
}
