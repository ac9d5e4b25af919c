use serde::{Deserialize, Serialize};

use super::DenseMatrix;
use crate::{Error, Result};

const MAX_SWEEPS: usize = 100;

/// Eigendecomposition of a symmetric matrix.
///
/// Eigenvalues are sorted in descending order; column `i` of `eigenvectors`
/// pairs with `eigenvalues[i]`. Each eigenvector is signed so that its first
/// non-negligible component is positive.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SymEig {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: DenseMatrix,
}

/// Symmetric eigendecomposition by cyclic Jacobi rotations.
pub fn sym_eig(a: &DenseMatrix) -> Result<SymEig> {
    if !a.is_square() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: a.ncols(),
        });
    }
    let n = a.nrows();
    let scale = a.max_abs().max(1.0);
    let mut asym: f64 = 0.0;
    for i in 0..n {
        for j in 0..i {
            asym = asym.max((a[(i, j)] - a[(j, i)]).abs());
        }
    }
    if asym > 1e-10 * scale {
        return Err(Error::NotSymmetric(asym));
    }

    let mut w = a.clone();
    // symmetrize exactly so the rotations see one consistent matrix
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (w[(i, j)] + w[(j, i)]);
            w[(i, j)] = v;
            w[(j, i)] = v;
        }
    }
    let mut v = DenseMatrix::identity(n);
    let target = 1e-17 * w.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| w[(i, j)] * w[(i, j)])
            .sum::<f64>()
            .sqrt();
        if off <= target {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = w[(p, q)];
                if apq.abs() < f64::MIN_POSITIVE {
                    continue;
                }
                let theta = (w[(q, q)] - w[(p, p)]) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                rotate(&mut w, &mut v, p, q, c, s);
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| w[(j, j)].total_cmp(&w[(i, i)]).then(i.cmp(&j)));
    let eigenvalues: Vec<f64> = order.iter().map(|&i| w[(i, i)]).collect();
    let mut eigenvectors = DenseMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let col = v.column(i);
        let big = col.iter().fold(0.0f64, |a, x| a.max(x.abs()));
        let sign = col
            .iter()
            .find(|x| x.abs() > 1e-8 * big)
            .map_or(1.0, |x| x.signum());
        for r in 0..n {
            eigenvectors[(r, k)] = sign * col[r];
        }
    }
    Ok(SymEig {
        eigenvalues,
        eigenvectors,
    })
}

/// Applies the rotation `Jᵀ W J` in the (p, q) plane and accumulates `V J`.
fn rotate(w: &mut DenseMatrix, v: &mut DenseMatrix, p: usize, q: usize, c: f64, s: f64) {
    let n = w.nrows();
    for k in 0..n {
        let wkp = w[(k, p)];
        let wkq = w[(k, q)];
        w[(k, p)] = c * wkp - s * wkq;
        w[(k, q)] = s * wkp + c * wkq;
    }
    for k in 0..n {
        let wpk = w[(p, k)];
        let wqk = w[(q, k)];
        w[(p, k)] = c * wpk - s * wqk;
        w[(q, k)] = s * wpk + c * wqk;
    }
    w[(p, q)] = 0.0;
    w[(q, p)] = 0.0;
    for k in 0..n {
        let vkp = v[(k, p)];
        let vkq = v[(k, q)];
        v[(k, p)] = c * vkp - s * vkq;
        v[(k, q)] = s * vkp + c * vkq;
    }
}

/// Number of eigenvalues strictly above `rel_tol · max(λ₁, 1e-300)`.
pub fn numeric_rank(eigenvalues: &[f64], rel_tol: f64) -> usize {
    let top = eigenvalues.iter().copied().fold(0.0f64, f64::max).max(1e-300);
    eigenvalues.iter().filter(|&&l| l > rel_tol * top).count()
}

fn checked_psd(a: &DenseMatrix) -> Result<SymEig> {
    let eig = sym_eig(a)?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0).abs().max(1.0);
    if let Some(&low) = eig.eigenvalues.last() {
        if low < -1e-10 * top {
            return Err(Error::NotPsd(low));
        }
    }
    Ok(eig)
}

fn spectral_map(eig: &SymEig, f: impl Fn(f64) -> f64) -> DenseMatrix {
    let n = eig.eigenvalues.len();
    let q = &eig.eigenvectors;
    let d: Vec<f64> = eig.eigenvalues.iter().map(|&l| f(l)).collect();
    let mut out = DenseMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v: f64 = (0..n).map(|k| q[(i, k)] * d[k] * q[(j, k)]).sum();
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    out
}

/// Symmetric PSD square root; eigenvalues down to `-1e-10` are clamped to zero.
pub fn psd_sqrt(a: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = checked_psd(a)?;
    Ok(spectral_map(&eig, |l| l.max(0.0).sqrt()))
}

/// Inverse square root of a symmetric positive definite matrix.
pub fn psd_inv_sqrt(a: &DenseMatrix) -> Result<DenseMatrix> {
    let eig = checked_psd(a)?;
    let top = eig.eigenvalues.first().copied().unwrap_or(0.0);
    if eig.eigenvalues.iter().any(|&l| l <= 1e-12 * top.max(1e-300)) {
        return Err(Error::RankDeficient);
    }
    Ok(spectral_map(&eig, |l| 1.0 / l.sqrt()))
}
