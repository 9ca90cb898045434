use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point {x:?} is outside the domain of the function")]
    EmptyDomain { x: Vec<f64> },

    #[error("{xstar:?} is not a subgradient at {x:?}")]
    NotASubgradient { x: Vec<f64>, xstar: Vec<f64> },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// The subspace differs from its adjoint, so no `(P, W)` basis exists.
    #[error("subspace is not self-adjoint (d_Z(L, L*) = {distance:e}); basis {basis:?}")]
    NotSelfAdjoint { distance: f64, basis: Vec<Vec<f64>> },

    #[error("(P, W) axioms violated: {0}")]
    AxiomViolation(String),

    #[error("[P; W] has rank {rank} < {n}")]
    RankDeficient { rank: usize, n: usize },

    #[error("need at least {needed} neighbours for a tangent fit, found {found}")]
    InsufficientSamples { found: usize, needed: usize },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("unknown builtin function `{0}`")]
    UnknownBuiltin(String),

    #[error("invalid function spec: {0}")]
    InvalidSpec(String),

    #[error("polynomial degree {degree} exceeds the catalog cap {cap}")]
    DegreeOverflow { degree: usize, cap: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("empty (P, W) set")]
    EmptyPwSet,
}

pub type Result<T> = std::result::Result<T, Error>;
