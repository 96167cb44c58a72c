use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    /// A point or argument lies outside the domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// A documented precondition of a construction does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// The operation needs structure the system does not have.
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// Working precision ran out.
    #[error("precision exhausted: {0}")]
    Precision(String),
    /// The requested instance does not fit in the chosen truncation.
    #[error("configuration error: {0}")]
    Config(String),
    /// A finite system violates one of its declared invariants.
    #[error("system defect: {0}")]
    SystemDefect(String),
    /// A self-check of a construction failed.
    #[error("internal check failed: {0}")]
    Internal(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
