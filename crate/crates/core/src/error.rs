use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("ambient mismatch: {0}")]
    AmbientMismatch(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("not Kummer: {0}")]
    NotKummer(String),
    #[error("kernel of f^gp is not contained in the monoid: {0}")]
    KernelNotContained(String),
    #[error("{0} is neither 0 nor a prime")]
    InvalidCharacteristic(u64),
    #[error("internal check failed: {0}")]
    Diagnostic(String),
}

pub type Result<T> = std::result::Result<T, Error>;
