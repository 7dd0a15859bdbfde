use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("a first row needs at least one entry")]
    EmptyRow,

    #[error("entry {index} is not finite")]
    NonFinite { index: usize },

    #[error("dimension must be positive")]
    ZeroDimension,

    #[error("exponent must be positive")]
    ZeroExponent,

    #[error("search bound must be positive")]
    ZeroSearchBound,

    #[error("operation undefined for the zero row")]
    ZeroRow,

    #[error("{0} requires a real first row")]
    ComplexInput(&'static str),

    #[error("dense oracle is limited to n <= {limit}, got n = {n}")]
    DimensionTooLarge { n: usize, limit: usize },

    #[error(
        "power iteration did not converge after {iterations} iterations (last estimate {estimate})"
    )]
    NotConverged { iterations: usize, estimate: f64 },

    #[error("membership margin {margin:e} lies inside the tolerance band")]
    Boundary { margin: f64 },

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(&'static str),

    #[error("cannot parse scalar {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("invalid table spec: {0}")]
    InvalidSpec(String),
}
