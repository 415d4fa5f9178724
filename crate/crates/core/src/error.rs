use thiserror::Error;

use crate::rational::Rat;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub(crate) fn new(line: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            message: message.into(),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("instance is not normalized: job {job} has total time {total} > 1")]
    NotNormalized { job: usize, total: Rat },

    #[error(
        "enumeration budget of {budget} exceeded after {examined} expansions; \
         use desk mode (a fixed gamma) or a larger epsilon"
    )]
    BudgetExceeded { budget: u64, examined: u64 },

    #[error("oracle size caps exceeded: {0}")]
    CapsExceeded(String),

    #[error("small-job assignment violates gap capacity on machine ({shop},{stage}) gap {gap}")]
    CapacityViolated { shop: usize, stage: usize, gap: usize },

    #[error("internal error: {0}")]
    Internal(String),

    #[error(transparent)]
    Parse(#[from] ParseError),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
