use thiserror::Error;

/// Failure reported by a user-supplied sampler (scenario or pair generator).
#[derive(Debug, Clone, Error)]
#[error("{0}")]
pub struct SamplerError(pub String);

impl SamplerError {
    pub fn new(msg: impl Into<String>) -> Self {
        Self(msg.into())
    }
}

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter or argument lies outside its admissible range.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: u64, column: usize, message: String },

    #[error("no data rows in {0}")]
    EmptyData(String),

    #[error("non-finite value at line {line}, column {column}")]
    NonFinite { line: u64, column: usize },

    #[error("unit mismatch: {0}")]
    ModeMismatch(String),

    #[error("sampler failed while {context}: {source}")]
    Sampler {
        context: String,
        #[source]
        source: SamplerError,
    },

    #[error("no index asset designated")]
    MissingIndex,

    #[error("expected discounted P&L vector is zero; the reward constraint is degenerate")]
    DegenerateReward,

    #[error("risk is not positive on the reward slice: {0}")]
    Unbounded(String),

    #[error("solver did not converge after {iterations} iterations (relative gap {gap:.3e})")]
    NonConvergence { iterations: usize, gap: f64 },

    #[error("zero denominator: {0}")]
    ZeroDenominator(String),

    #[error("contact measure is not risk-neutral: worst |E_R dS| = {worst:.3e} exceeds {tolerance:.3e}")]
    RiskNeutrality { worst: f64, tolerance: f64 },

    #[error("extreme measure charges scenario {scenario} which has zero real-world weight")]
    AbsoluteContinuity { scenario: usize },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
