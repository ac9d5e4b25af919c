//! Symmetric positive cubature rules for the uniform measure on the unit ball.

use serde::{Deserialize, Serialize};

use crate::linalg::{nnls, sym_eig, DenseMatrix};
use crate::poly::{ball_monomial_moment, monomials_up_to};
use crate::sampling::{rng, uniform_ball};
use crate::{Error, Result};

/// Largest moment mismatch a rule may have.
pub const CUBATURE_TOL: f64 = 1e-8;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CubatureRule {
    pub dim: usize,
    pub degree: u32,
    pub nodes: Vec<Vec<f64>>,
    pub weights: Vec<f64>,
}

impl CubatureRule {
    /// Largest error over all monomials of total degree `≤ degree`.
    pub fn moment_error(&self) -> f64 {
        monomials_up_to(self.dim, self.degree)
            .iter()
            .map(|alpha| (self.integrate_monomial(alpha) - ball_monomial_moment(alpha)).abs())
            .fold(0.0, f64::max)
    }

    pub fn integrate_monomial(&self, alpha: &[u32]) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(v, w)| w * v.iter().zip(alpha).map(|(x, &a)| x.powi(a as i32)).product::<f64>())
            .sum()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }
}

/// Gauss-Legendre rule for the uniform probability measure on `[-1, 1]`
/// (Golub-Welsch), exact to degree `2k − 1`.
fn gauss_legendre(k: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut jacobi = DenseMatrix::zeros(k, k);
    for i in 1..k {
        let j = i as f64;
        let b = j / (4.0 * j * j - 1.0).sqrt();
        jacobi[(i - 1, i)] = b;
        jacobi[(i, i - 1)] = b;
    }
    let eig = sym_eig(&jacobi)?;
    let mut pairs: Vec<(f64, f64)> = (0..k)
        .map(|i| (eig.eigenvalues[i], eig.eigenvectors[(0, i)].powi(2)))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    // symmetrize against roundoff
    for i in 0..k / 2 {
        let x = 0.5 * (pairs[k - 1 - i].0 - pairs[i].0);
        let w = 0.5 * (pairs[k - 1 - i].1 + pairs[i].1);
        pairs[i] = (-x, w);
        pairs[k - 1 - i] = (x, w);
    }
    if k % 2 == 1 {
        pairs[k / 2].0 = 0.0;
    }
    let total: f64 = pairs.iter().map(|p| p.1).sum();
    Ok((pairs.iter().map(|p| p.0).collect(), pairs.iter().map(|p| p.1 / total).collect()))
}

/// A positive rule on the unit ball of `ℝ^dim`, exact for every monomial of
/// total degree `≤ degree`. Nodes come in `±v` pairs with equal weights.
pub fn build_cubature(dim: usize, degree: u32, seed: u64) -> Result<CubatureRule> {
    if dim == 0 {
        return Err(Error::InvalidArgument("cubature dimension must be positive".into()));
    }
    if dim == 1 {
        let (nodes, weights) = gauss_legendre(degree as usize / 2 + 1)?;
        let rule = CubatureRule {
            dim,
            degree,
            nodes: nodes.into_iter().map(|x| vec![x]).collect(),
            weights,
        };
        return validated(rule);
    }
    let even: Vec<Vec<u32>> = monomials_up_to(dim, degree)
        .into_iter()
        .filter(|a| a.iter().sum::<u32>() % 2 == 0)
        .collect();
    let target: Vec<f64> = even.iter().map(|a| ball_monomial_moment(a)).collect();
    let mut worst = f64::INFINITY;
    for attempt in 0..4u64 {
        let count = (10 * even.len()).max(200) << attempt;
        let mut r = rng(seed.wrapping_add(attempt));
        let mut candidates = vec![vec![0.0; dim]];
        candidates.extend((0..count).map(|_| uniform_ball(&mut r, dim)));
        // a pair (v, −v) with total weight w contributes w·v^α on even α
        let columns: Vec<Vec<f64>> = candidates
            .iter()
            .map(|v| {
                even.iter()
                    .map(|a| v.iter().zip(a).map(|(x, &e)| x.powi(e as i32)).product())
                    .collect()
            })
            .collect();
        let system = DenseMatrix::from_columns(even.len(), &columns)?;
        let pair_weights = nnls(&system, &target)?;
        let mut nodes = Vec::new();
        let mut weights = Vec::new();
        for (v, &w) in candidates.iter().zip(&pair_weights) {
            if w <= 1e-15 {
                continue;
            }
            if v.iter().all(|&x| x == 0.0) {
                nodes.push(v.clone());
                weights.push(w);
            } else {
                nodes.push(v.clone());
                weights.push(0.5 * w);
                nodes.push(v.iter().map(|x| -x).collect());
                weights.push(0.5 * w);
            }
        }
        let rule = CubatureRule {
            dim,
            degree,
            nodes,
            weights,
        };
        let err = rule.moment_error();
        if err <= CUBATURE_TOL {
            return Ok(rule);
        }
        worst = worst.min(err);
    }
    Err(Error::CubatureFailed(worst))
}

fn validated(rule: CubatureRule) -> Result<CubatureRule> {
    let err = rule.moment_error();
    if err > CUBATURE_TOL {
        return Err(Error::CubatureFailed(err));
    }
    Ok(rule)
}
