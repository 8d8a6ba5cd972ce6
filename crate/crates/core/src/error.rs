use thiserror::Error;

/// Errors shared across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("denominator must be nonzero")]
    InvalidDenominator,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("integer overflow in exact rational arithmetic")]
    Overflow,

    #[error("resource budget exceeded: {0}")]
    Resource(String),

    #[error("scale error: {0}")]
    Scale(String),

    #[error("sparse branch: density below N^(-1/3)")]
    SparseBranch,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
