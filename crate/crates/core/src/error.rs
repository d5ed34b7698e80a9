use thiserror::Error;

/// Errors raised by the core engine.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,
    #[error("logarithm of a non-positive value")]
    LogDomain,
    #[error("evaluation hit a pole")]
    Pole,
    #[error("point has {got} coordinates, expected {expected}")]
    PointLength { expected: usize, got: usize },
    #[error("coordinate index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("zero test inconclusive: only {valid} of {required} sample points were evaluable")]
    Inconclusive { valid: usize, required: usize },
    #[error("invalid chart: {0}")]
    InvalidChart(String),
    #[error("chart mismatch: {left} vs {right}")]
    ChartMismatch { left: String, right: String },
    #[error("degree mismatch: {0}")]
    Degree(String),
    #[error("matrix is singular")]
    Singular,
    #[error("invalid Lie algebra: {0}")]
    InvalidLieAlgebra(String),
    #[error("chart map: {0}")]
    ChartMap(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no volume matching exists: {0}")]
    Unsolvable(String),
}

pub type Result<T> = std::result::Result<T, Error>;
