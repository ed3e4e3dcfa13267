use thiserror::Error;

/// Errors produced across the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// A covariance matrix violates the Heisenberg bound or positivity.
    #[error("non-physical state: {0}")]
    NonPhysical(String),
    /// A fit design matrix is numerically rank-deficient.
    #[error("ill-conditioned problem: {0}")]
    IllConditioned(String),
    #[error("iteration did not converge: {0}")]
    NoConvergence(String),
    #[error("calibration impossible: {0}")]
    Calibration(String),
    /// A scan or sweep does not bracket the feature it is meant to locate.
    #[error("out of range: {0}")]
    OutOfRange(String),
    /// Malformed persisted data (binary container or JSON artifact).
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }
}
