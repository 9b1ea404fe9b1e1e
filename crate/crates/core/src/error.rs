use thiserror::Error;

/// Errors reported by the library.
#[derive(Debug, Error)]
pub enum Error {
    /// A parameter failed validation (non-finite, out of range, wrong shape).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// An input slice has the wrong length for the requested operation.
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    /// A coordinate lies outside the frame or codeword it addresses.
    #[error("out of range: {0}")]
    OutOfRange(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    /// A serialized file is malformed or of the wrong kind.
    #[error("malformed input: {0}")]
    Format(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
