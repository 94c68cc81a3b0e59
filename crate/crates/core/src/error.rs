use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// An exhaustive computation would exceed its size guard.
    #[error("resource limit: {what} needs {required}, limit is {limit}")]
    ResourceLimit {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    /// The exponent optimizer could not certify its answer.
    #[error("optimizer did not converge: best value {best}, duality gap {residual}")]
    NotConverged { best: f64, residual: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
