use thiserror::Error;

/// Errors raised by the exact tensor-calculus layer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    /// Shapes, dimensions or indices that do not fit together.
    #[error("argument error: {0}")]
    Argument(String),
    /// Input outside the class of objects an operation supports.
    #[error("unsupported input: {0}")]
    Unsupported(String),
    /// A section violating its defining identity (e.g. J² ≠ −1).
    #[error("invalid section: {0}")]
    InvalidSection(String),
    /// det g vanishes at the requested point.
    #[error("degenerate metric: {0}")]
    DegenerateMetric(String),
    /// Dimension or degree beyond the configured caps.
    #[error("limit exceeded: {0}")]
    Limit(String),
    #[error("internal error: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
