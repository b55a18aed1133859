use thiserror::Error;

/// Errors produced by the weight, mean, geometry and inequality routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("weight at index {index} is negative ({value})")]
    NegativeWeight { index: usize, value: String },
    #[error("weights sum to zero")]
    AllZero,
    #[error("first weight must be positive")]
    FirstWeightZero,
    #[error("empty input")]
    Empty,
    #[error("exact arithmetic overflow in {0}")]
    Overflow(&'static str),
    #[error("division by zero")]
    DivisionByZero,
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(String),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("entry {value} at index {index} lies outside the domain {domain}")]
    DomainViolation {
        index: usize,
        value: f64,
        domain: String,
    },
    #[error("weight at index {0} is not an integer")]
    NonIntegerWeight(usize),
    #[error("non-finite value encountered: {0}")]
    NonFinite(String),
    #[error("deviation solver failed: {0}")]
    SolverFailure(String),
    #[error("deviation solver did not converge within {0} iterations")]
    MaxIterations(usize),
    #[error("index {0} does not carry a zero weight")]
    IndexNotZeroWeighted(usize),
    #[error("index {index} out of range for length {len}")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("invalid generator: {0}")]
    InvalidGenerator(String),
    #[error("invalid deviation: {0}")]
    InvalidDeviation(String),
    #[error("inverse generator returned {value}, outside {domain}")]
    InverseOutOfRange { value: f64, domain: String },
    #[error("derivative vanishes at t = {0}")]
    VanishingDerivative(f64),
    #[error("second derivative changes sign on the domain")]
    MixedSignSecondDerivative,
    #[error("derivative is not available for {0}")]
    MissingDerivative(String),
    #[error("theta {0} is outside [0, 1]")]
    ThetaOutOfRange(String),
    #[error("invalid interval: {0}")]
    InvalidInterval(String),
    #[error("invalid partition: {0}")]
    InvalidPartition(String),
    #[error("weights are not in V_n: {0}")]
    WeightsNotInV(String),
    #[error("weights are in V_n")]
    WeightsInV,
    #[error("weight at index {0} must be positive")]
    NonpositiveWeight(usize),
    #[error("interior zero weight at index {0} with weights outside V_n")]
    InteriorZeroWeight(usize),
    #[error("affine scale must be nonzero")]
    ZeroScale,
    #[error("invalid mean: {0}")]
    InvalidMean(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("{0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
