use thiserror::Error;

/// Errors raised by the decomposition library.
#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument (length mismatch, non-finite samples, zero reference).
    #[error("invalid argument: {0}")]
    Argument(String),
    /// The requested configuration cannot be realized on this grid.
    #[error("configuration error: {0}")]
    Config(String),
    /// The input is already a trend at the requested scale.
    #[error("signal is a trend: {0}")]
    Trend(String),
    /// A dense computation was requested above its size budget.
    #[error("dense budget exceeded: {0}")]
    Budget(String),
    /// A numerical invariant that should hold by construction was violated.
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}
