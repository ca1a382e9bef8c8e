use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("parse error: {0}")]
    Parse(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid structure: {0}")]
    Invalid(String),
    #[error("search budget of {budget} states exceeded")]
    BudgetExceeded { budget: u64 },
    #[error("cap exceeded: no answer at heights up to {cap}")]
    CapExceeded { cap: usize },
    #[error("K = {0} is too large for the exhaustive backend")]
    KTooLarge(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn precondition<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Precondition(msg.into()))
}
