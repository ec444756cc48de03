use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes do not fit the operation.
    #[error("dimension error: {0}")]
    Dimension(String),
    /// An argument is outside the documented range.
    #[error("usage error: {0}")]
    Usage(String),
    /// The input violates a mathematical precondition (not Hermitian, not PSD, not commuting).
    #[error("domain error: {0}")]
    Domain(String),
    /// An iteration failed to converge or produced non-finite values.
    #[error("numerical error: {0}")]
    Numerical(String),
    /// The request is valid but not supported by the implementation.
    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
