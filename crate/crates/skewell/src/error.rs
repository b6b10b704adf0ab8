use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not symmetric: max asymmetry {max_asym:e} exceeds tolerance")]
    NotSymmetric { max_asym: f64 },

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("diagonal entry {value} at row {row} is not 1 (correlation-normalized matrix required)")]
    DiagNotUnit { row: usize, value: f64 },

    #[error("skewness too large: delta Sigma^-1 delta' = {quad_form} >= 1")]
    SkewnessTooLarge { quad_form: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("quadrature failed to converge: {detail}")]
    QuadratureFailure { detail: String },

    #[error("declared tail class disagrees with measured behaviour: {detail}")]
    ClassMismatch { detail: String },

    #[error("operation requires the {expected} tail regime")]
    WrongRegime { expected: &'static str },

    #[error("dispersion matrix is not correlation-normalized (unit diagonal required)")]
    SigmaNotNormalized,

    #[error("marginal skewness parameters have unsupported signs: {detail}")]
    MixedSignSkewness { detail: String },

    #[error("argument outside the function domain: {detail}")]
    DomainError { detail: String },

    #[error("skewness incompatible with dispersion: {detail}")]
    IncompatibleSkewness { detail: String },

    #[error("too few samples: {got} < {required}")]
    TooFewSamples { got: usize, required: usize },

    #[error("no exact sampler for this generator family")]
    UnsupportedGenerator,

    #[error("quantile root-finding failed: {detail}")]
    QuantileFailure { detail: String },

    #[error("invalid configuration: {detail}")]
    ConfigError { detail: String },
}

pub type Result<T> = std::result::Result<T, Error>;
