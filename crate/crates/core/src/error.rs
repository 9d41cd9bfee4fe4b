use thiserror::Error;

/// Errors raised by the field, measure, inverse and statistics layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid field spec: {0}")]
    InvalidSpec(String),

    #[error("grid spacing {spacing} exceeds the resolution limit {limit} (epsilon/4)")]
    GridTooCoarse { spacing: f64, limit: f64 },

    #[error("covariance matrix is not positive definite (pivot {pivot} at jitter {jitter:e})")]
    NotPositiveDefinite { pivot: usize, jitter: f64 },

    #[error("value {value} outside domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("insufficient mass: need {needed}, available {available}")]
    InsufficientMass { needed: f64, available: f64 },

    #[error("scale mismatch: {0}")]
    ScaleMismatch(String),

    #[error("quadrature did not converge: {0}")]
    DegenerateTail(String),

    #[error("too few samples: got {got}, need at least {need}")]
    TooFewSamples { got: usize, need: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("degenerate regression design: all abscissae equal")]
    DegenerateDesign,

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
