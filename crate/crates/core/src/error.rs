//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid arguments or violated preconditions (bad counts, arity
    /// mismatches, unknown identifiers).
    #[error("usage error: {0}")]
    Usage(String),

    /// An input point lies outside the function's domain box.
    #[error("domain error: {0}")]
    Domain(String),

    /// A file exists but its contents do not match the expected format.
    #[error("format error: {0}")]
    Format(String),

    /// The requested operation is not defined for this function.
    #[error("unsupported function: {0}")]
    UnsupportedFunction(String),

    /// Training produced a non-finite loss.
    #[error("training diverged at epoch {epoch}: {message}")]
    Diverged { epoch: usize, message: String },

    /// A statistic is undefined for the given data (zero output range,
    /// zero combined variance, constant column).
    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn format(msg: impl Into<String>) -> Self {
        Error::Format(msg.into())
    }
}
