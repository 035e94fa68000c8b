use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("division by zero: {0}")]
    DivisionByZero(&'static str),

    #[error("precondition violated: {0}")]
    PreconditionViolation(String),

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("divergent series: {0}")]
    Divergent(String),

    #[error("inconclusive: {0}")]
    Inconclusive(String),

    #[error("inconclusive singular-value gap: {0}")]
    InconclusiveGap(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;
