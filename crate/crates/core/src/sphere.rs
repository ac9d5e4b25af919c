//! Reduction of `min h` over the unit sphere `S^{n-1}` to `min g` over the
//! unit ball in `ℝ^m`, where `g(y) = f(L·y)` and `L = (ellᵀell)^{1/2}`.
//!
//! The map `x ↦ (ellᵀell)^{-1/2} ellᵀx` sends the sphere onto the ball
//! whenever `m < n`, so both problems share their minimum value.

use serde::{Deserialize, Serialize};

use crate::detection::{row_forms, SparseForm};
use crate::linalg::{norm, psd_inv_sqrt, psd_sqrt, sym_eig, DenseMatrix};
use crate::{Error, Result};
use crate::Polynomial;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReducedBallProblem {
    /// `g(y) = f(L·y)` in `m` variables.
    pub g: Polynomial,
    /// `L = (ellᵀell)^{1/2}`.
    #[serde(rename = "L")]
    pub root_gram: DenseMatrix,
    pub source: SparseForm,
}

pub fn reduce_sphere(sf: &SparseForm) -> Result<ReducedBallProblem> {
    let m = sf.m();
    let gram = sf.ell.gram();
    let identity = DenseMatrix::identity(m);
    if gram.sub(&identity)?.max_abs() <= 1e-10 {
        return Ok(ReducedBallProblem {
            g: sf.f.clone(),
            root_gram: identity,
            source: sf.clone(),
        });
    }
    let eig = sym_eig(&gram)?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if eig.eigenvalues.iter().any(|&l| l <= 1e-12 * top.max(1e-300)) {
        return Err(Error::RankDeficient);
    }
    let root_gram = psd_sqrt(&gram)?;
    let g = sf.f.substitute_linear(&row_forms(&root_gram))?;
    Ok(ReducedBallProblem {
        g,
        root_gram,
        source: sf.clone(),
    })
}

/// Lifts a ball point `y` to `x ∈ S^{n-1}` with `ellᵀx = L·y`, hence
/// `h(x) = g(y)`.
pub fn lift_minimizer(prob: &ReducedBallProblem, y: &[f64]) -> Result<Vec<f64>> {
    let ell = &prob.source.ell;
    let (n, m) = ell.shape();
    if y.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: y.len(),
        });
    }
    let r = norm(y);
    if r > 1.0 + 1e-10 {
        return Err(Error::OutsideDomain(r));
    }
    let radial = (1.0 - r * r).max(0.0).sqrt();
    if m == n && r < 1.0 - 1e-8 {
        return Err(Error::NoSphereLift);
    }
    let mut x = if m == 0 {
        vec![0.0; n]
    } else {
        let coords = psd_inv_sqrt(&ell.gram())?.matvec(y)?;
        ell.matvec(&coords)?
    };
    if m < n && radial > 0.0 {
        let outer = ell.matmul(&ell.transpose())?;
        let eig = sym_eig(&outer)?;
        let w = eig.eigenvectors.column(n - 1);
        let wn = norm(&w);
        for (xi, wi) in x.iter_mut().zip(&w) {
            *xi += radial * wi / wn;
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sum_form() -> SparseForm {
        let f = Polynomial::var(1, 0).pow(2);
        SparseForm::new(f, DenseMatrix::from_rows(&[vec![1.0], vec![1.0]]).unwrap()).unwrap()
    }

    #[test]
    fn reduce_sum_square() {
        let prob = reduce_sphere(&sum_form()).unwrap();
        assert!((prob.root_gram[(0, 0)] - 2f64.sqrt()).abs() < 1e-12);
        let expected = Polynomial::from_terms(1, [(vec![2], 2.0)]).unwrap();
        assert!(prob.g.max_coef_diff(&expected) < 1e-12);
    }

    #[test]
    fn orthonormal_shortcut_and_linear() {
        let e1 = DenseMatrix::from_rows(&[vec![1.0], vec![0.0], vec![0.0]]).unwrap();
        let sf = SparseForm::new(Polynomial::var(1, 0), e1).unwrap();
        let prob = reduce_sphere(&sf).unwrap();
        assert_eq!(prob.g, sf.f);
        assert_eq!(prob.root_gram, DenseMatrix::identity(1));
        let x = lift_minimizer(&prob, &[-1.0]).unwrap();
        assert_eq!(x, vec![-1.0, 0.0, 0.0]);
    }

    #[test]
    fn lift_center_uses_kernel() {
        let sf = sum_form();
        let prob = reduce_sphere(&sf).unwrap();
        let x = lift_minimizer(&prob, &[0.0]).unwrap();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((x[0].abs() - s).abs() < 1e-12 && (x[0] + x[1]).abs() < 1e-12);
        assert!(sf.evaluate(&x).unwrap().abs() < 1e-12);
    }

    #[test]
    fn lift_preserves_value() {
        let sf = sum_form();
        let prob = reduce_sphere(&sf).unwrap();
        for y in [0.3, -0.7, 1.0] {
            let x = lift_minimizer(&prob, &[y]).unwrap();
            assert!((norm(&x) - 1.0).abs() < 1e-12);
            assert!((sf.evaluate(&x).unwrap() - prob.g.eval(&[y])).abs() < 1e-12);
        }
    }

    #[test]
    fn full_rank_needs_boundary() {
        let sf = SparseForm::new(Polynomial::var(2, 0), DenseMatrix::identity(2)).unwrap();
        let prob = reduce_sphere(&sf).unwrap();
        assert_eq!(lift_minimizer(&prob, &[0.1, 0.2]), Err(Error::NoSphereLift));
        assert!(lift_minimizer(&prob, &[0.6, 0.8]).is_ok());
    }

    #[test]
    fn rank_deficient_is_rejected() {
        let ell = DenseMatrix::from_rows(&[vec![1.0, 2.0], vec![1.0, 2.0]]).unwrap();
        let sf = SparseForm::new(Polynomial::var(2, 0), ell).unwrap();
        assert_eq!(reduce_sphere(&sf), Err(Error::RankDeficient));
    }
}
