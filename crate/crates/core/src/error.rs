use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a monic polynomial needs at least one root")]
    EmptyRoots,

    #[error("degree must be at least 1")]
    DegreeZero,

    #[error("leading normalized coefficient must be 1, got {0}")]
    LeadingCoefficient(String),

    #[error("degree mismatch: {left} vs {right}")]
    DegreeMismatch { left: usize, right: usize },

    #[error("root {index} is {value}, which lies outside the negative half-line")]
    NonNegativeRoot { index: usize, value: f64 },

    #[error("coefficient-only polynomial is not sign-alternating at k={0}, so its roots cannot all be negative")]
    NotSignAlternating(usize),

    #[error("operation needs the roots of p, which were not supplied")]
    MissingRoots,

    #[error("s = {s} is outside the admissible range (alpha = {alpha})")]
    OutOfDomain { s: f64, alpha: f64 },

    #[error("x = {0} must be positive")]
    NonPositivePoint(f64),

    #[error("FFF transform vanishes at N*s = {0}: the finite R-transform has a pole")]
    Pole(f64),

    #[error("saddle-point solve failed: {0}")]
    SaddleFailed(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("n = {n} exceeds the partition enumeration cap {cap}")]
    PartitionCap { n: usize, cap: usize },

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("unsupported: {0}")]
    Unsupported(String),
}

pub type Result<T> = std::result::Result<T, Error>;
