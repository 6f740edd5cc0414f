use thiserror::Error;

/// Errors raised by chain, kernel and source operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level {level} exceeds the enumeration budget {budget}")]
    BudgetExceeded { level: usize, budget: usize },

    #[error("cylinder enumeration needs {needed} atoms, budget is {budget}")]
    AtomBudgetExceeded { needed: u128, budget: u128 },

    #[error("transition row of {state} sums to {sum}, not 1")]
    NonStochastic { state: String, sum: String },

    #[error("conditioning state {state} has probability zero")]
    UnreachableConditioning { state: String },

    #[error("target state {state} has probability zero")]
    UnreachableTarget { state: String },

    #[error("function is not harmonic at {state} (residual {residual})")]
    NotHarmonic { state: String, residual: String },

    #[error("function takes value {value} at the root, expected 1")]
    RootNotNormalized { value: String },

    #[error("cotransitions differ at {mismatches} pair(s)")]
    CotransitionMismatch { mismatches: usize },

    #[error("base chain gives probability zero to {state}")]
    ZeroBaseProbability { state: String },

    #[error("state {state} lies outside the support of h")]
    OutsideSupport { state: String },

    #[error("h-transform does not reproduce the observed law at {mismatches} path(s)")]
    RecoveryMismatch { mismatches: usize },

    #[error("value {value} outside [0, 1)")]
    Domain { value: String },

    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    OutOfAlphabet { symbol: usize, alphabet: usize },

    #[error("malformed law: {0}")]
    MalformedLaw(String),

    #[error("invalid simplex point: {0}")]
    InvalidSimplex(String),

    #[error("invalid source: {0}")]
    InvalidSource(String),

    #[error("malformed rational {0:?}")]
    MalformedRational(String),

    #[error("empty path")]
    EmptyPath,
}

pub type Result<T> = std::result::Result<T, Error>;
