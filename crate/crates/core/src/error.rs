use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid base {0}")]
    InvalidBase(String),
    #[error("invalid digit set: {0}")]
    InvalidDigits(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty set")]
    EmptySet,
    #[error("no gap available")]
    NoGap,
    #[error("precision exhausted before the comparison could be decided ({0} bits)")]
    PrecisionExhausted(u32),
    #[error("no alignment found with n <= {0}")]
    AlignmentNotFound(u64),
    #[error("window bound violated: {0}")]
    WindowBound(String),
    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
