use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("invalid epsilon {epsilon}: must satisfy 0 < epsilon <= 1/d = {max}")]
    InvalidEpsilon { epsilon: f64, max: f64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("empty state space")]
    EmptyStateSpace,
    #[error("invalid target: {0}")]
    InvalidTarget(String),
    #[error("state {0} is outside the support of the target")]
    OutsideSupport(String),
    #[error("state enumerations differ")]
    EnumerationMismatch,
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),
    #[error("power iteration did not converge within {cap} iterations")]
    NoConvergence { cap: usize },
    #[error("non-finite output from adaptation rule at step {step}")]
    NonFiniteRule { step: usize },
    #[error("zero target density at the current state")]
    ZeroDensity,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("observable has weight {weight:e} on the unit eigenvalue")]
    UnitEigenvalueWeight { weight: f64 },
    #[error("trace has zero variance")]
    ZeroVariance,
    #[error("trace too short: {len} < {min}")]
    TraceTooShort { len: usize, min: usize },
    #[error("batch for coordinate {coordinate} is not complete ({count} of {size})")]
    OffBatchBoundary {
        coordinate: usize,
        count: usize,
        size: usize,
    },
    #[error("config error: {0}")]
    Config(String),
    #[error("missing column {0}")]
    MissingColumn(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
