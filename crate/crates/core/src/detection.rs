//! Detection of the gradient subspace `V = span{∇h(x)}` and extraction of
//! the sparse form `h(x) = f(lᵀx)`.
//!
//! Two detectors are provided. [`detect_exact`] builds the moment matrix
//! `E[∇h ∇hᵀ]` under the uniform ball measure in closed form and reads `m`
//! off its spectrum; `V` is spanned by the eigenvectors of the nonzero
//! eigenvalues. [`detect_randomized`] samples gradients at random ball
//! points until the Gram rank stops growing.

use serde::{Deserialize, Serialize};

use crate::linalg::{
    numeric_rank, orthonormality_error, orthonormalize, select_independent_columns, sym_eig,
    DenseMatrix,
};
use crate::poly::expectation_product;
use crate::sampling::{rng, uniform_ball};
use crate::{Error, Polynomial, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DetectionMethod {
    Exact,
    Randomized,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DetectionReport {
    pub m: usize,
    /// `n × m`, orthonormal columns spanning the gradient subspace.
    pub basis: DenseMatrix,
    /// Moment-matrix eigenvalues (exact) or final Gram eigenvalues (randomized).
    pub spectrum: Vec<f64>,
    pub method: DetectionMethod,
    pub samples_used: usize,
    pub rank_tol: f64,
    /// Gram rank after each sample (randomized only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub rank_trace: Vec<usize>,
}

/// `h(x) = f(ellᵀ x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparseForm {
    pub f: Polynomial,
    pub ell: DenseMatrix,
}

impl SparseForm {
    pub fn new(f: Polynomial, ell: DenseMatrix) -> Result<Self> {
        if f.num_vars() != ell.ncols() {
            return Err(Error::DimensionMismatch {
                expected: ell.ncols(),
                got: f.num_vars(),
            });
        }
        Ok(Self { f, ell })
    }

    pub fn n(&self) -> usize {
        self.ell.nrows()
    }

    pub fn m(&self) -> usize {
        self.ell.ncols()
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        let proj = self.ell.tr_matvec(x)?;
        Ok(self.f.eval(&proj))
    }

    /// Expands `f(ellᵀx)` into a polynomial in `n` variables.
    pub fn expand(&self) -> Result<Polynomial> {
        self.f.substitute_linear(&column_forms(&self.ell))
    }
}

/// Linear forms `ell_jᵀ x`, one per column.
pub(crate) fn column_forms(ell: &DenseMatrix) -> Vec<Polynomial> {
    ell.columns().iter().map(|c| Polynomial::linear(c)).collect()
}

/// Linear forms `x_i = Σ_j ell_ij X_j`, one per row.
pub(crate) fn row_forms(ell: &DenseMatrix) -> Vec<Polynomial> {
    (0..ell.nrows()).map(|i| Polynomial::linear(ell.row(i))).collect()
}

/// `M = E[∇h ∇hᵀ]` under the uniform distribution on the unit ball.
pub fn moment_matrix(h: &Polynomial) -> DenseMatrix {
    let n = h.num_vars();
    let grad = h.gradient();
    let mut m = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = expectation_product(&grad[i], &grad[j]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
    m
}

pub fn detect_exact(h: &Polynomial, rank_tol: f64) -> Result<DetectionReport> {
    let n = h.num_vars();
    let eig = sym_eig(&moment_matrix(h))?;
    let m = numeric_rank(&eig.eigenvalues, rank_tol);
    let basis = if m == 0 {
        DenseMatrix::zeros(n, 0)
    } else {
        orthonormalize(&eig.eigenvectors.leading_columns(m))?
    };
    Ok(DetectionReport {
        m,
        basis,
        spectrum: eig.eigenvalues,
        method: DetectionMethod::Exact,
        samples_used: 0,
        rank_tol,
        rank_trace: Vec::new(),
    })
}

/// Samples gradients until `rank(H_kᵀH_k) = rank(H_{k-1}ᵀH_{k-1})`.
pub fn detect_randomized(
    h: &Polynomial,
    seed: u64,
    rank_tol: f64,
    max_k: usize,
) -> Result<DetectionReport> {
    if max_k < 2 {
        return Err(Error::InvalidArgument("max_k must be at least 2".into()));
    }
    let n = h.num_vars();
    let grad = h.gradient();
    let mut r = rng(seed);
    let mut columns: Vec<Vec<f64>> = Vec::new();
    let mut trace = Vec::new();
    for k in 1..=max_k {
        let x = uniform_ball(&mut r, n);
        columns.push(grad.iter().map(|g| g.eval(&x)).collect());
        let hk = DenseMatrix::from_columns(n, &columns)?;
        let eig = sym_eig(&hk.gram())?;
        let rank = numeric_rank(&eig.eigenvalues, rank_tol);
        trace.push(rank);
        if k >= 2 && trace[k - 2] == rank {
            let previous = DenseMatrix::from_columns(n, &columns[..k - 1])?;
            let picked: Vec<Vec<f64>> = select_independent_columns(&previous, rank)
                .into_iter()
                .map(|j| previous.column(j))
                .collect();
            let basis = orthonormalize(&DenseMatrix::from_columns(n, &picked)?)?;
            return Ok(DetectionReport {
                m: rank,
                basis,
                spectrum: eig.eigenvalues,
                method: DetectionMethod::Randomized,
                samples_used: k,
                rank_tol,
                rank_trace: trace,
            });
        }
    }
    Err(Error::RankNotStabilized(max_k))
}

/// Builds `f(X) = h(ell·X)`; valid because `ell` has orthonormal columns,
/// so `(ellᵀell)⁻¹ellᵀ = ellᵀ`.
pub fn extract_sparse_form(h: &Polynomial, basis: &DenseMatrix) -> Result<SparseForm> {
    if basis.nrows() != h.num_vars() {
        return Err(Error::DimensionMismatch {
            expected: h.num_vars(),
            got: basis.nrows(),
        });
    }
    let err = orthonormality_error(basis);
    if err > 1e-8 {
        return Err(Error::NotOrthonormal(err));
    }
    let f = h.substitute_linear(&row_forms(basis))?;
    SparseForm::new(f, basis.clone())
}

/// `max |h(x) − f(ellᵀx)| / max(1, |h(x)|)` over random ball points.
pub fn verify_sparse_form(h: &Polynomial, sf: &SparseForm, num_points: usize, seed: u64) -> Result<f64> {
    let n = h.num_vars();
    if sf.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sf.n(),
        });
    }
    let mut r = rng(seed);
    let mut worst: f64 = 0.0;
    for _ in 0..num_points {
        let x = uniform_ball(&mut r, n);
        let hx = h.eval(&x);
        let fx = sf.evaluate(&x)?;
        worst = worst.max((hx - fx).abs() / hx.abs().max(1.0));
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::max_principal_angle;

    fn sum_sq() -> Polynomial {
        Polynomial::linear(&[1.0, 1.0]).pow(2)
    }

    #[test]
    fn moment_matrix_examples() {
        // E[4(x₁+x₂)²] = 4·(1/4 + 1/4) = 2 in every entry
        let m = moment_matrix(&sum_sq());
        for v in m.as_slice() {
            assert!((v - 2.0).abs() < 1e-14);
        }
        assert_eq!(moment_matrix(&Polynomial::constant(3, 2.0)).max_abs(), 0.0);
        let m = moment_matrix(&Polynomial::var(2, 0));
        assert_eq!(m.to_rows(), vec![vec![1.0, 0.0], vec![0.0, 0.0]]);
    }

    #[test]
    fn exact_detection_examples() {
        let r = detect_exact(&sum_sq(), 1e-8).unwrap();
        assert_eq!(r.m, 1);
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let b = r.basis.column(0);
        assert!((b[0].abs() - s).abs() < 1e-12 && (b[0] - b[1]).abs() < 1e-12);

        let full = &Polynomial::var(2, 0).pow(2) + &Polynomial::var(2, 1).pow(2);
        assert_eq!(detect_exact(&full, 1e-8).unwrap().m, 2);

        let c = detect_exact(&Polynomial::constant(3, 1.0), 1e-8).unwrap();
        assert_eq!(c.m, 0);
        assert_eq!(c.basis.shape(), (3, 0));
    }

    #[test]
    fn randomized_detection_examples() {
        let target = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        let target = orthonormalize(&target).unwrap();
        for seed in 0..5 {
            let r = detect_randomized(&sum_sq(), seed, 1e-8, 4).unwrap();
            assert_eq!(r.m, 1);
            assert!(max_principal_angle(&r.basis, &target) < 1e-12);
        }
        let lin = Polynomial::linear(&[1.0, 1.0, 1.0]);
        let r = detect_randomized(&lin, 7, 1e-8, 5).unwrap();
        assert_eq!((r.m, r.samples_used), (1, 2));
    }

    #[test]
    fn randomized_needs_two_samples() {
        assert!(detect_randomized(&sum_sq(), 0, 1e-8, 1).is_err());
        let full = &(&Polynomial::var(3, 0).pow(2) + &Polynomial::var(3, 1).pow(2))
            + &Polynomial::var(3, 2).pow(2);
        assert_eq!(
            detect_randomized(&full, 0, 1e-8, 3),
            Err(Error::RankNotStabilized(3))
        );
        assert_eq!(detect_randomized(&full, 0, 1e-8, 5).unwrap().m, 3);
    }

    #[test]
    fn extraction_examples() {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        let basis = DenseMatrix::from_rows(&[vec![s], vec![s]]).unwrap();
        let sf = extract_sparse_form(&sum_sq(), &basis).unwrap();
        let expected = Polynomial::from_terms(1, [(vec![2], 2.0)]).unwrap();
        assert!(sf.f.max_coef_diff(&expected) < 1e-14);
        assert!(verify_sparse_form(&sum_sq(), &sf, 200, 1).unwrap() < 1e-12);

        let e1 = DenseMatrix::from_rows(&[vec![1.0], vec![0.0]]).unwrap();
        let sf = extract_sparse_form(&Polynomial::var(2, 0), &e1).unwrap();
        assert_eq!(sf.f, Polynomial::var(1, 0));

        let c = Polynomial::constant(2, 3.5);
        let sf = extract_sparse_form(&c, &DenseMatrix::zeros(2, 0)).unwrap();
        assert_eq!(sf.f.num_vars(), 0);
        assert_eq!(sf.f.eval(&[]), 3.5);
        assert_eq!(verify_sparse_form(&c, &sf, 50, 0).unwrap(), 0.0);
    }

    #[test]
    fn extraction_rejects_non_orthonormal() {
        let basis = DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap();
        assert!(matches!(
            extract_sparse_form(&sum_sq(), &basis),
            Err(Error::NotOrthonormal(_))
        ));
    }

    #[test]
    fn wrong_form_has_large_residual() {
        let h = Polynomial::var(2, 0).pow(2);
        let sf = SparseForm::new(
            Polynomial::var(1, 0).pow(2),
            DenseMatrix::from_rows(&[vec![0.0], vec![1.0]]).unwrap(),
        )
        .unwrap();
        assert!(verify_sparse_form(&h, &sf, 200, 3).unwrap() > 0.1);
    }
}
