use thiserror::Error;

/// Error type shared by every module in the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum OrbitaError {
    /// Input outside the mathematical domain (not a prime power, degree too large, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed call: mismatched fields, wrong shapes, bad arguments.
    #[error("usage error: {0}")]
    Usage(String),

    /// A request the tool declines to carry out for the given parameters.
    #[error("refused: {0}")]
    Refused(String),

    /// The requested work exceeds the configured point budget.
    #[error("budget exceeded: {0}")]
    Budget(String),

    /// A computed object failed an internal cross-check.
    #[error("consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for OrbitaError {
    fn from(e: std::io::Error) -> Self {
        OrbitaError::Io(e.to_string())
    }
}

impl From<serde_json::Error> for OrbitaError {
    fn from(e: serde_json::Error) -> Self {
        OrbitaError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, OrbitaError>;
