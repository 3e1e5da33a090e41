use thiserror::Error;

/// Failures reported by the numerical routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("problem too large: {what} has {size} elements (cap {cap})")]
    TooLarge { what: &'static str, size: u128, cap: u128 },
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("refused: {0}")]
    Refused(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
