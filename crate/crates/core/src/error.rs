//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument fell outside its documented domain.
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// A sample set that cannot be fitted (constant, too short, ...).
    #[error("degenerate sample set: {0}")]
    DegenerateSamples(String),

    /// A malformed CSV row; `row` is 1-based and counts the header.
    #[error("{path}:{row}: {message}")]
    Csv {
        path: String,
        row: usize,
        message: String,
    },

    /// A generator was asked to run outside its permitted output band.
    #[error("dispatch contract violation: {0}")]
    DispatchContract(String),

    /// Cost of energy is undefined when no load is served.
    #[error("cost of energy undefined: annual served load is zero")]
    CoeUndefined,

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
