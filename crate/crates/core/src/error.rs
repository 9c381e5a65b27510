use num_bigint::BigUint;
use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("distribution has no strictly positive weight")]
    EmptySupport,
    #[error("weights sum to {sum}, which is not within tolerance of 1")]
    NotNormalized { sum: f64 },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
    #[error("weight {index} is not a finite number")]
    NonFiniteWeight { index: usize },
    #[error("perturbation size {delta} is out of range (must lie in (0, {limit}))")]
    InvalidDelta { delta: f64, limit: f64 },
    #[error("operation requires a non-trivial distribution (support size > 1)")]
    TrivialDistribution,
    #[error("operation requires a non-uniform distribution")]
    UniformDistribution,
    #[error("order parameter {alpha} is out of range")]
    AlphaOutOfRange { alpha: f64 },
    #[error("support mismatch: {0}")]
    SupportMismatch(String),
    #[error("value {value} outside [{lo}, {hi}]")]
    ValueOutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("composition budget exceeded: {states} states required, budget is {budget}")]
    BudgetExceeded { states: BigUint, budget: u64 },
    #[error("target distribution is trivial")]
    TrivialTarget,
    #[error("distributions coincide after sorting; the implication chain is degenerate")]
    DegenerateChain,
    #[error("invalid rational literal `{0}`")]
    InvalidRational(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Input could not be read or understood.
    pub fn is_parse(&self) -> bool {
        matches!(
            self,
            Error::Parse(_)
                | Error::InvalidRational(_)
                | Error::EmptySupport
                | Error::NotNormalized { .. }
                | Error::NegativeWeight { .. }
                | Error::NonFiniteWeight { .. }
        )
    }

    pub fn is_budget(&self) -> bool {
        matches!(self, Error::BudgetExceeded { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
