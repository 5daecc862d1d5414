use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum QpiError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("division by a zero divisor of Q(q)^pi")]
    DivisionByZeroDivisor,
    #[error("value is not regular at q = 0")]
    NotRegularAtZero,
    #[error("index {0} out of range")]
    IndexOutOfRange(usize),
    #[error("height {height} exceeds cutoff {cutoff}")]
    CutoffExceeded { height: usize, cutoff: usize },
    #[error("module dimension exceeds budget {0}")]
    DimensionBudgetExceeded(usize),
    #[error("weight is not dominant: {0}")]
    NonDominantWeight(String),
    #[error("invalid Cartan datum: {0}")]
    InvalidDatum(String),
    #[error("vectors belong to different modules")]
    ModuleMismatch,
    #[error("canonical basis correction did not terminate within degree {0}")]
    NonTerminating(i64),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("cache I/O: {0}")]
    Cache(String),
    #[error("check failed: {0}")]
    CheckFailed(String),
}

pub type Result<T> = std::result::Result<T, QpiError>;
