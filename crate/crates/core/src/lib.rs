//! Detection and exploitation of polynomials that are functions of a few
//! linear forms, `h(x) = f(lᵀx)` with `l` an `n × m` matrix and `m ≪ n`.
//!
//! The crate is organized bottom-up:
//!
//! * [`poly`]: sparse multivariate polynomials and exact moments on the unit ball.
//! * [`linalg`]: dense matrices, Jacobi eigendecomposition, and a small simplex LP solver.
//! * [`detection`]: gradient-subspace detection and extraction of the sparse form.
//! * [`sphere`]: reduction of sphere problems to low-dimensional ball problems.
//! * [`polytope`]: Farkas-cut reduction of polytope problems.
//! * [`approx`]: conditional-expectation surrogates for approximately sparse polynomials.
//! * [`solvers`]: multi-start local solvers and a brute-force oracle.
//! * [`instances`]: random test-instance generator.

pub mod approx;
pub mod detection;
mod error;
pub mod instances;
pub mod linalg;
pub mod poly;
pub mod polytope;
pub mod sampling;
pub mod solvers;
pub mod sphere;

pub use error::{Error, Result};
pub use linalg::DenseMatrix;
pub use poly::Polynomial;

/// Coefficients with absolute value below this are dropped after arithmetic.
pub const DROP_TOL: f64 = 1e-14;

/// Default relative tolerance deciding numeric rank (and hence `m`).
pub const DEFAULT_RANK_TOL: f64 = 1e-8;
