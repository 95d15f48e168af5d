use thiserror::Error;

/// Errors raised by the geometry kernels and the verification harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid signature: {0}")]
    InvalidSignature(String),

    #[error("degenerate subspace: every candidate has |<v,v>| <= {tol:e}")]
    DegenerateSubspace { tol: f64 },

    #[error("eigen solver did not converge within {iterations} iterations")]
    ConvergenceFailure { iterations: usize },

    #[error("matrix of dimension {dim} exceeds the eigen solver bound {max}")]
    TooLarge { dim: usize, max: usize },

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("numerical rank failure: expected nullity {expected}, found {got}")]
    RankFailure { expected: usize, got: usize },

    #[error("not an orthogonal complex structure: {0}")]
    NotComplexStructure(String),

    #[error("eigenvalue {re:+e}{im:+e}i lies outside {{0, ±2i, ±4i}}")]
    SpectrumViolation { re: f64, im: f64 },

    #[error("dimension {dim} is below the supported minimum {min}")]
    DimensionTooSmall { dim: usize, min: usize },

    #[error("curvature operator fails the first Bianchi identity (residual {residual:e})")]
    NotAlgebraic { residual: f64 },

    #[error("gradient is not the metric raise of the differential (residual {residual:e})")]
    InconsistentGradient { residual: f64 },

    #[error("finite-difference curve leaves the chart (<y,y> = {norm:e})")]
    CurveLeavesChart { norm: f64 },

    #[error("rotation undefined: 1 + <u,v> = {value:e}")]
    AntipodalOrDegenerate { value: f64 },

    #[error("point is not on the pseudo-sphere (|<x,x> - 1| = {residual:e})")]
    NotOnSphere { residual: f64 },

    #[error("vector is not tangent (residual {residual:e})")]
    NotTangent { residual: f64 },

    #[error("incompatible complex structure: {0}")]
    IncompatibleJ(String),

    #[error("least-squares samples are degenerate: the coefficient vanishes on every sample")]
    DegenerateSamples,

    #[error("map is not an isometry fixing the extra direction (residual {residual:e})")]
    NotIsometry { residual: f64 },

    #[error("unknown suite `{0}`")]
    UnknownSuite(String),

    #[error("unsupported dimension: {0}")]
    UnsupportedDimension(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
