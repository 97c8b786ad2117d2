use thiserror::Error;

/// Errors raised anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("state space has more than {cap} states")]
    CapExceeded { cap: usize },

    /// The chain's transition graph on the support is not strongly connected.
    #[error("reducible chain: {0}")]
    Reducible(String),

    #[error("incomplete cover: sites {missing:?} never appear in the sequence")]
    IncompleteCover { missing: Vec<usize> },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("report schema error: {0}")]
    Schema(String),

    #[error("simulation error: {0}")]
    Simulation(String),

    #[error("numerical check failed: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
