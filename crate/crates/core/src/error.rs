use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("HODLR partition trees do not match")]
    TreeMismatch,
    #[error("argument outside the domain: {0}")]
    Domain(String),
    #[error("matrix is singular (zero pivot at index {0})")]
    Singular(usize),
    #[error("matrix is not positive definite (leaf factorization failed at offset {0})")]
    NotPositiveDefinite(usize),
    #[error("malformed rotation sequence: {0}")]
    MalformedSequence(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("I/O error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
