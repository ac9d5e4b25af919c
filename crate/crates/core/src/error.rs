use thiserror::Error;

/// Errors produced by the lowform library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("substitution form {index} has degree {degree}, expected at most 1")]
    NonLinearForm { index: usize, degree: u32 },

    #[error("matrix is not symmetric (asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("matrix is not positive semidefinite (eigenvalue {0:e})")]
    NotPsd(f64),

    #[error("columns are linearly dependent")]
    RankDeficient,

    #[error("basis columns are not orthonormal (deviation {0:e})")]
    NotOrthonormal(f64),

    #[error("linear program stalled after {0} pivots")]
    LpStalled(usize),

    #[error("linear program is infeasible")]
    LpInfeasible,

    #[error("linear program is unbounded")]
    LpUnbounded,

    #[error("gradient rank did not stabilize within {0} samples")]
    RankNotStabilized(usize),

    #[error("no sphere lift: m = n and the reduced point lies strictly inside the ball")]
    NoSphereLift,

    #[error("point is outside the model domain (|l^T x| = {0})")]
    OutsideDomain(f64),

    #[error("polytope is empty")]
    EmptyPolytope,

    #[error("polytope is unbounded along coordinate {0}")]
    UnboundedPolytope(usize),

    #[error("normalized cone section is empty; the projection is unconstrained")]
    DegenerateCone,

    #[error("cubature rule construction failed (residual {0:e})")]
    CubatureFailed(f64),

    #[error("cubature rule of degree {rule} cannot integrate degree {needed}")]
    DegreeDeficientRule { rule: u32, needed: u32 },

    #[error("dimension {0} is too large for the brute-force oracle")]
    DimensionTooLarge(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
