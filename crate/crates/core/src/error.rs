use thiserror::Error;

/// Unified error type for construction, validation and numeric failures.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("vector contains a non-finite entry")]
    NonFinite,

    #[error("invalid norm parameter: {0}")]
    InvalidNorm(String),

    #[error("gram matrix is not Hermitian positive definite")]
    NotPositiveDefinite,

    #[error("gram matrix condition number {cond:.3e} exceeds limit {limit:.3e}")]
    IllConditioned { cond: f64, limit: f64 },

    #[error("facet set does not define a bounded unit ball (facets must span)")]
    UnboundedBall,

    #[error("facet set is not symmetric under negation")]
    AsymmetricFacets,

    #[error("polyhedral norms act on real vectors; entry {index} has imaginary part {imag:.3e}")]
    NotReal { index: usize, imag: f64 },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("point id {0:?} not found in phase space")]
    UnknownPoint(String),

    #[error("duplicate point id {0:?}")]
    DuplicatePoint(String),

    #[error("basis matrix does not have full column rank (rank {rank} < {cols})")]
    RankDeficientBasis { rank: usize, cols: usize },

    #[error("operation requires a nonzero vector")]
    ZeroVector,

    #[error("vector is not on the unit sphere: norm {norm:.6e}")]
    OffSphere { norm: f64 },

    #[error("{op} is exact only for {supported}; this norm variant needs the approximate path")]
    ApproximateOnly { op: &'static str, supported: &'static str },

    #[error("linear program failed: {0}")]
    LpFailure(String),

    #[error("model is not 1-independent: zero point evaluation at point index {0}")]
    NotOneIndependent(usize),

    #[error("weight does not induce a multiplier: least-squares residual {residual:.3e} exceeds {limit:.3e}")]
    NotAMultiplier { residual: f64, limit: f64 },

    #[error("operator is not a multiplication operator: point evaluation {point} is not an eigenvector (residual {residual:.3e})")]
    NotAnEigenvector { point: usize, residual: f64 },

    #[error("operator is not isometric: {0}")]
    NotIsometric(String),

    #[error("operator is not invertible: condition number {cond:.3e} exceeds {limit:.3e}")]
    NotInvertible { cond: f64, limit: f64 },

    #[error("eigenvalue disagreement inside component: edge ({x}, {y}) carries weights differing by {deviation:.3e} (tolerance {limit:.3e})")]
    ComponentDisagreement { x: usize, y: usize, deviation: f64, limit: f64 },

    #[error("weight vanishes at point index {0}")]
    VanishingWeight(usize),

    #[error("invariant core is trivial; rigidity statement is vacuous")]
    VacuousCore,

    #[error("core restriction requires a Hilbert-type coefficient norm")]
    UnsupportedRestriction,

    #[error("phase map image point index {0} out of range")]
    BadPhaseMap(usize),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
