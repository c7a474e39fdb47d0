use thiserror::Error;

/// Errors raised by state builders, marginal routines and propagators.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("dense storage of {entries} entries exceeds cap {cap}")]
    StorageCap { entries: u128, cap: usize },

    #[error("sector dimension {dim} exceeds cap {cap}")]
    SectorCap { dim: u128, cap: usize },

    #[error("orbitals are not orthonormal (Gram deviation {0:.3e})")]
    NotOrthonormal(f64),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("order {k} out of range 1..={max}")]
    OrderOutOfRange { k: usize, max: usize },

    #[error("multi-index {0:?} is out of range")]
    IndexOutOfRange(Vec<usize>),

    #[error("fractions sum to {0}, expected 1")]
    FractionsNotNormalized(f64),

    #[error("frame mismatch: {0}")]
    FrameMismatch(String),

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error("step size too large: norm drift {drift:.3e}; retry with dt <= {suggested_dt:.3e}")]
    StepTooLarge { drift: f64, suggested_dt: f64 },

    #[error("quadrature order {got} below the exactness threshold {required}")]
    QuadratureOrder { got: usize, required: usize },

    #[error("Krylov propagation did not converge within {0} substeps")]
    KrylovNoConvergence(usize),

    #[error("confinement violated: {0}")]
    Confinement(String),

    #[error("expected {expected} theta nodes, got {got}")]
    MissingNodes { expected: usize, got: usize },

    #[error("rate fit needs at least 4 points, got {0}")]
    TooFewPoints(usize),

    #[error("rate fit needs strictly positive finite values, got ({0}, {1})")]
    NonPositive(f64, f64),

    #[error("factorized path requires spatially identical orbitals with orthogonal spinors")]
    NotToyModel,
}

pub type Result<T> = std::result::Result<T, Error>;
