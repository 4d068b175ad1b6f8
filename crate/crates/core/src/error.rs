use thiserror::Error;

/// Errors raised by the core library.
///
/// The variants are grouped so front ends can map them onto a small exit-code
/// taxonomy: configuration problems, exhausted precision or compute budgets,
/// and falsification events (outcomes that contradict a structural property
/// the construction is supposed to have).
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("modulus {0} is not a prime in [2, 65536]")]
    InvalidModulus(u64),

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("horizon exceeded: coefficient index {needed} requested, series known up to index {horizon}")]
    HorizonExceeded { needed: i64, horizon: i64 },

    #[error("budget exceeded: {0}")]
    BudgetExceeded(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("falsification: {0}")]
    Falsification(String),
}

impl Error {
    pub fn is_falsification(&self) -> bool {
        matches!(self, Error::Falsification(_))
    }

    /// True for errors caused by running out of coefficients or compute budget.
    pub fn is_budget(&self) -> bool {
        matches!(
            self,
            Error::HorizonExceeded { .. } | Error::BudgetExceeded(_)
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
