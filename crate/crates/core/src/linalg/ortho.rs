use super::{dot, norm, sym_eig, DenseMatrix};
use crate::{Error, Result};

/// Orthonormal basis of the column span (modified Gram-Schmidt, two passes).
pub fn orthonormalize(columns: &DenseMatrix) -> Result<DenseMatrix> {
    let n = columns.nrows();
    let mut q: Vec<Vec<f64>> = Vec::with_capacity(columns.ncols());
    for mut c in columns.columns() {
        let original = norm(&c);
        for _ in 0..2 {
            for b in &q {
                let d = dot(b, &c);
                for (ci, bi) in c.iter_mut().zip(b) {
                    *ci -= d * bi;
                }
            }
        }
        let r = norm(&c);
        if r <= 1e-10 * original || r == 0.0 {
            return Err(Error::RankDeficient);
        }
        c.iter_mut().for_each(|v| *v /= r);
        q.push(c);
    }
    DenseMatrix::from_columns(n, &q)
}

/// Greedy column pivoting: indices of `k` columns with the largest residual
/// norms after projecting out previously chosen columns.
pub fn select_independent_columns(columns: &DenseMatrix, k: usize) -> Vec<usize> {
    let mut resid = columns.columns();
    let mut chosen = Vec::with_capacity(k);
    for _ in 0..k.min(resid.len()) {
        let (best, _) = resid
            .iter()
            .enumerate()
            .filter(|(i, _)| !chosen.contains(i))
            .map(|(i, c)| (i, norm(c)))
            .fold((usize::MAX, -1.0), |acc, (i, r)| if r > acc.1 { (i, r) } else { acc });
        if best == usize::MAX {
            break;
        }
        chosen.push(best);
        let r = norm(&resid[best]);
        if r == 0.0 {
            continue;
        }
        let unit: Vec<f64> = resid[best].iter().map(|v| v / r).collect();
        for c in resid.iter_mut() {
            let d = dot(&unit, c);
            for (ci, ui) in c.iter_mut().zip(&unit) {
                *ci -= d * ui;
            }
        }
    }
    chosen
}

/// `max |QᵀQ − I|`.
pub fn orthonormality_error(q: &DenseMatrix) -> f64 {
    let g = q.gram();
    let mut worst: f64 = 0.0;
    for i in 0..g.nrows() {
        for j in 0..g.ncols() {
            let target = if i == j { 1.0 } else { 0.0 };
            worst = worst.max((g[(i, j)] - target).abs());
        }
    }
    worst
}

/// Largest principal angle (radians) between the spans of two matrices with
/// orthonormal columns. Subspaces of different dimension are at angle π/2.
pub fn max_principal_angle(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    if a.shape() != b.shape() {
        return std::f64::consts::FRAC_PI_2;
    }
    if a.ncols() == 0 {
        return 0.0;
    }
    // sin θ_max is the spectral norm of (I − AAᵀ)B
    let proj = a.matmul(&a.transpose().matmul(b).expect("shapes checked")).expect("shapes checked");
    let resid = b.sub(&proj).expect("shapes checked");
    let top = sym_eig(&resid.gram())
        .map(|e| e.eigenvalues[0].max(0.0))
        .unwrap_or(1.0);
    top.sqrt().min(1.0).asin()
}
