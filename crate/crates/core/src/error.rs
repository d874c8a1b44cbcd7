use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unsupported dimension {0}; only 2 and 3 are implemented")]
    UnsupportedDimension(usize),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("harmonic index (m = {m}, j = {j}) out of range in dimension {dim}")]
    InvalidIndex { dim: usize, m: usize, j: usize },

    #[error("not a rotation: {0}")]
    InvalidRotation(String),

    #[error("matrix is singular (|det| = {det:e})")]
    SingularMatrix { det: f64 },

    #[error("quadrature of exact degree {available} cannot resolve order {order} (needs degree >= {required})")]
    QuadratureTooCoarse { order: usize, required: usize, available: usize },

    #[error("radial function is not positive ({value:e}) in direction {direction:?}")]
    NonPositiveRadial { value: f64, direction: [f64; 3] },

    #[error("support function is not sublinear: violation {violation:e} at directions {u:?}, {v:?}")]
    NotSublinear { violation: f64, u: [f64; 3], v: [f64; 3] },

    #[error("generator has no coefficient above {tau:e} at order {order} (largest |c| = {largest:e})")]
    DegenerateGenerator { order: usize, largest: f64, tau: f64 },

    #[error("target carries order {order}, which the generator profile does not cover")]
    OrderNotProfiled { order: usize },

    #[error("residual {sup:e} exceeds tolerance {tolerance:e} (g_condition = {g_condition:e}, {rotations} rotations)")]
    ResidualTooLarge { sup: f64, tolerance: f64, g_condition: f64, rotations: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("no sample passed: {0}")]
    NoPasser(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),
}
