//! Dense least squares by Householder QR and Lawson-Hanson NNLS.

use super::{dot, norm, DenseMatrix};
use crate::{Error, Result};

/// `argmin ‖Ax − b‖₂`. Columns whose pivot falls below `1e-12·max|R_ii|`
/// get a zero coefficient.
pub fn least_squares(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let (rows, cols) = a.shape();
    if b.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: b.len(),
        });
    }
    let mut r = a.clone();
    let mut rhs = b.to_vec();
    let steps = cols.min(rows);
    for k in 0..steps {
        let col: Vec<f64> = (k..rows).map(|i| r[(i, k)]).collect();
        let alpha = norm(&col);
        if alpha == 0.0 {
            continue;
        }
        let sign = if col[0] >= 0.0 { 1.0 } else { -1.0 };
        let mut v = col;
        v[0] += sign * alpha;
        let vnorm2 = dot(&v, &v);
        if vnorm2 == 0.0 {
            continue;
        }
        for j in k..cols {
            let proj: f64 = (k..rows).map(|i| v[i - k] * r[(i, j)]).sum::<f64>() * 2.0 / vnorm2;
            for i in k..rows {
                r[(i, j)] -= proj * v[i - k];
            }
        }
        let proj: f64 = (k..rows).map(|i| v[i - k] * rhs[i]).sum::<f64>() * 2.0 / vnorm2;
        for i in k..rows {
            rhs[i] -= proj * v[i - k];
        }
    }
    let scale = (0..steps).fold(0.0f64, |m, i| m.max(r[(i, i)].abs()));
    let mut x = vec![0.0; cols];
    for k in (0..steps).rev() {
        let d = r[(k, k)];
        if d.abs() <= 1e-12 * scale {
            continue;
        }
        let s: f64 = ((k + 1)..cols).map(|j| r[(k, j)] * x[j]).sum();
        x[k] = (rhs[k] - s) / d;
    }
    Ok(x)
}

/// Lawson-Hanson: `argmin ‖Ax − b‖₂` subject to `x ≥ 0`.
pub fn nnls(a: &DenseMatrix, b: &[f64]) -> Result<Vec<f64>> {
    let (rows, cols) = a.shape();
    if b.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: b.len(),
        });
    }
    let tol = 10.0 * f64::EPSILON * a.max_abs().max(1e-300) * rows.max(cols) as f64;
    let mut x = vec![0.0; cols];
    let mut passive = vec![false; cols];
    let residual_grad = |x: &[f64]| -> Result<Vec<f64>> {
        let ax = a.matvec(x)?;
        let res: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        a.tr_matvec(&res)
    };
    let mut w = residual_grad(&x)?;
    for _ in 0..3 * cols.max(1) {
        let next = (0..cols)
            .filter(|&j| !passive[j] && w[j] > tol)
            .max_by(|&i, &j| w[i].total_cmp(&w[j]));
        let Some(t) = next else { break };
        passive[t] = true;
        loop {
            let idx: Vec<usize> = (0..cols).filter(|&j| passive[j]).collect();
            let sub = DenseMatrix::from_columns(rows, &idx.iter().map(|&j| a.column(j)).collect::<Vec<_>>())?;
            let zs = least_squares(&sub, b)?;
            let mut z = vec![0.0; cols];
            for (k, &j) in idx.iter().enumerate() {
                z[j] = zs[k];
            }
            if idx.iter().all(|&j| z[j] > 0.0) {
                x = z;
                break;
            }
            let alpha = idx
                .iter()
                .filter(|&&j| z[j] <= 0.0)
                .map(|&j| x[j] / (x[j] - z[j]))
                .fold(f64::INFINITY, f64::min);
            for j in 0..cols {
                x[j] += alpha * (z[j] - x[j]);
            }
            for &j in &idx {
                if x[j] <= tol {
                    x[j] = 0.0;
                    passive[j] = false;
                }
            }
            if !passive.iter().any(|&p| p) {
                break;
            }
        }
        w = residual_grad(&x)?;
    }
    Ok(x)
}
