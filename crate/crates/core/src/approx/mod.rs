//! Approximate sparsity: replace `h` by its conditional expectation given
//! the projection onto the `m` dominant gradient directions.
//!
//! With `ell` the top eigenvectors of the moment matrix and `s` the rest,
//! a ball point decomposes as `x = ell·X + s·z` and, given `X`, `z` is
//! uniform on the ball of radius `Y = √(1 − ‖X‖²)`. Hence
//! `E[h | ellᵀx = X] = f̂(X, Y)` with
//! `f̂(X, Y) = E_v[h(ell·X + Y·s·v)]`, `v` uniform on the unit ball.

mod cubature;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::detection::{column_forms, moment_matrix};
use crate::linalg::{norm, sym_eig, DenseMatrix};
use crate::poly::ball_monomial_moment;
use crate::sampling::{stream_rng, uniform_ball};
use crate::solvers::{minimize_sphere, SolveOptions, SolveResult, SphereHalf};
use crate::{Error, Polynomial, Result};

pub use cubature::{build_cubature, CubatureRule, CUBATURE_TOL};

/// Default tail-mass threshold for [`choose_m`].
pub const DEFAULT_TAIL_RATIO: f64 = 1e-2;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpectrumSplit {
    /// `n × m` dominant eigenvectors.
    pub ell: DenseMatrix,
    /// `n × (n − m)` remaining eigenvectors.
    pub s: DenseMatrix,
    pub lambda_head: Vec<f64>,
    pub lambda_tail: Vec<f64>,
}

impl SpectrumSplit {
    pub fn n(&self) -> usize {
        self.ell.nrows()
    }

    pub fn m(&self) -> usize {
        self.ell.ncols()
    }

    pub fn tail_mass(&self) -> f64 {
        self.lambda_tail.iter().sum()
    }
}

/// Polynomial `f̂(X, Y)` in `m + 1` variables, `Y` last.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LiftedPolynomial {
    pub m: usize,
    pub poly: Polynomial,
}

impl LiftedPolynomial {
    pub fn evaluate(&self, reduced: &[f64], y: f64) -> f64 {
        let mut point = reduced.to_vec();
        point.push(y);
        self.poly.eval(&point)
    }

    /// Largest coefficient among terms with an odd power of `Y`.
    pub fn odd_y_mass(&self) -> f64 {
        self.poly
            .terms()
            .filter(|(e, _)| e[self.m] % 2 == 1)
            .fold(0.0, |a, (_, c)| a.max(c.abs()))
    }

    /// `G(X) = f̂(X, √(1 − ‖X‖²))` as a polynomial in `X`; defined when `f̂`
    /// has only even powers of `Y`.
    pub fn on_hemisphere(&self) -> Result<Polynomial> {
        let odd = self.odd_y_mass();
        if odd > 0.0 {
            return Err(Error::InvalidArgument(format!("odd powers of Y present (max coefficient {odd:e})")));
        }
        let m = self.m;
        let halved = Polynomial::from_terms(
            m + 1,
            self.poly.terms().map(|(e, c)| {
                let mut e = e.to_vec();
                e[m] /= 2;
                (e, c)
            }),
        )?;
        let mut forms: Vec<Polynomial> = (0..m).map(|j| Polynomial::var(m, j)).collect();
        let mut radial = Polynomial::constant(m, 1.0);
        for j in 0..m {
            radial = &radial - &Polynomial::var(m, j).pow(2);
        }
        forms.push(radial);
        halved.compose(&forms)
    }

    /// Largest coefficient among terms that involve `Y`.
    pub fn y_mass(&self) -> f64 {
        self.poly
            .terms()
            .filter(|(e, _)| e[self.m] > 0)
            .fold(0.0, |a, (_, c)| a.max(c.abs()))
    }
}

pub fn split_spectrum(h: &Polynomial, m: usize) -> Result<SpectrumSplit> {
    let n = h.num_vars();
    if m == 0 || m >= n {
        return Err(Error::InvalidArgument(format!("need 1 ≤ m < n, got m = {m}, n = {n}")));
    }
    let eig = sym_eig(&moment_matrix(h))?;
    Ok(SpectrumSplit {
        ell: eig.eigenvectors.column_range(0, m),
        s: eig.eigenvectors.column_range(m, n),
        lambda_head: eig.eigenvalues[..m].to_vec(),
        lambda_tail: eig.eigenvalues[m..].to_vec(),
    })
}

/// Smallest `m ≥ 1` whose tail carries less than `ratio` of the spectrum;
/// `n` when no split qualifies.
pub fn choose_m(spectrum: &[f64], ratio: f64) -> usize {
    let n = spectrum.len();
    let total: f64 = spectrum.iter().map(|v| v.max(0.0)).sum();
    if total <= 0.0 {
        return n.min(1);
    }
    (1..n)
        .find(|&m| spectrum[m..].iter().map(|v| v.max(0.0)).sum::<f64>() / total < ratio)
        .unwrap_or(n)
}

/// Forms `x_i = Σ_j ell_ij X_j + Σ_k s_ik V_k` in the variables `(X, V)`.
fn split_forms(split: &SpectrumSplit) -> Vec<Polynomial> {
    (0..split.n())
        .map(|i| {
            let mut row = split.ell.row(i).to_vec();
            row.extend_from_slice(split.s.row(i));
            Polynomial::linear(&row)
        })
        .collect()
}

fn check_split(h: &Polynomial, split: &SpectrumSplit) -> Result<()> {
    if h.num_vars() != split.n() || split.s.nrows() != split.n() {
        return Err(Error::DimensionMismatch {
            expected: split.n(),
            got: h.num_vars(),
        });
    }
    Ok(())
}

/// Integrates out `V` term by term with the closed-form ball moments.
pub fn conditional_expectation_exact(h: &Polynomial, split: &SpectrumSplit) -> Result<LiftedPolynomial> {
    check_split(h, split)?;
    let m = split.m();
    let expanded = h.substitute_linear(&split_forms(split))?;
    let terms = expanded.terms().filter_map(|(e, c)| {
        let moment = ball_monomial_moment(&e[m..]);
        if moment == 0.0 {
            return None;
        }
        let mut exp = e[..m].to_vec();
        exp.push(e[m..].iter().sum());
        Some((exp, c * moment))
    });
    Ok(LiftedPolynomial {
        m,
        poly: Polynomial::from_terms(m + 1, terms.collect::<Vec<_>>())?,
    })
}

/// `Σ_j θ_j h(ell·X + Y·s·v_j)` for a cubature rule `(θ_j, v_j)`.
pub fn conditional_expectation_cubature(
    h: &Polynomial,
    split: &SpectrumSplit,
    rule: &CubatureRule,
) -> Result<LiftedPolynomial> {
    check_split(h, split)?;
    let (n, m) = (split.n(), split.m());
    if rule.dim != n - m {
        return Err(Error::DimensionMismatch {
            expected: n - m,
            got: rule.dim,
        });
    }
    if rule.degree < h.degree() {
        return Err(Error::DegreeDeficientRule {
            rule: rule.degree,
            needed: h.degree(),
        });
    }
    let mut total = Polynomial::zero(m + 1);
    for (v, &theta) in rule.nodes.iter().zip(&rule.weights) {
        let sv = split.s.matvec(v)?;
        let forms: Vec<Polynomial> = (0..n)
            .map(|i| {
                let mut coeffs = split.ell.row(i).to_vec();
                coeffs.push(sv[i]);
                Polynomial::linear(&coeffs)
            })
            .collect();
        total = &total + &h.substitute_linear(&forms)?.scale(theta);
    }
    Ok(LiftedPolynomial { m, poly: total })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QSolution {
    pub rho: f64,
    pub rho_plus: f64,
    pub rho_minus: f64,
    /// Minimizer `(X, Y)` on the unit sphere of `ℝ^{m+1}`.
    pub point: Vec<f64>,
    pub plus: SolveResult,
    pub minus: SolveResult,
}

/// `ρ⁺ = min f̂(X, Y)` and `ρ⁻ = min f̂(X, −Y)` on the half-spheres `Y ≥ 0`
/// and `Y ≤ 0` of `S^m`; `ρ = min(ρ⁺, ρ⁻)`.
pub fn solve_q(fhat: &LiftedPolynomial, opts: &SolveOptions) -> Result<QSolution> {
    let m = fhat.m;
    let mut flip = vec![vec![0.0; m + 1]; m + 1];
    for (j, row) in flip.iter_mut().enumerate() {
        row[j] = if j == m { -1.0 } else { 1.0 };
    }
    let forms: Vec<Polynomial> = flip.iter().map(|r| Polynomial::linear(r)).collect();
    let mirrored = fhat.poly.substitute_linear(&forms)?;
    let plus = minimize_sphere(&fhat.poly, opts, SphereHalf::LastNonneg);
    let minus = minimize_sphere(&mirrored, opts, SphereHalf::LastNonpos);
    let (rho, point) = if plus.value <= minus.value {
        (plus.value, plus.point.clone())
    } else {
        let mut p = minus.point.clone();
        p[m] = -p[m];
        (minus.value, p)
    };
    Ok(QSolution {
        rho,
        rho_plus: plus.value,
        rho_minus: minus.value,
        point,
        plus,
        minus,
    })
}

/// `ĥ(x) = f̂(ellᵀx, √(1 − ‖ellᵀx‖²))`.
pub fn hhat_eval(fhat: &LiftedPolynomial, split: &SpectrumSplit, x: &[f64]) -> Result<f64> {
    let reduced = split.ell.tr_matvec(x)?;
    let r = norm(&reduced);
    if r > 1.0 + 1e-6 {
        return Err(Error::OutsideDomain(r));
    }
    let y = (1.0 - r * r).max(0.0).sqrt();
    Ok(fhat.evaluate(&reduced, y))
}

/// `ĥ` as a polynomial in `x` (even-`Y` surrogates only).
pub fn hhat_polynomial(fhat: &LiftedPolynomial, split: &SpectrumSplit) -> Result<Polynomial> {
    fhat.on_hemisphere()?.substitute_linear(&column_forms(&split.ell))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct MonteCarloEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

const BLOCK: usize = 10_000;

/// Mean of `g(x)` over uniform ball samples, evaluated in parallel blocks
/// with one random stream per block and summed in block order.
pub fn ball_average<G>(n: usize, num_samples: usize, seed: u64, g: G) -> Result<MonteCarloEstimate>
where
    G: Fn(&[f64]) -> Result<f64> + Sync,
{
    if num_samples < 2 {
        return Err(Error::InvalidArgument("need at least two samples".into()));
    }
    let blocks = num_samples.div_ceil(BLOCK);
    let sums: Vec<(f64, f64)> = (0..blocks)
        .into_par_iter()
        .map(|b| {
            let mut r = stream_rng(seed, b as u64);
            let count = BLOCK.min(num_samples - b * BLOCK);
            let mut s = 0.0;
            let mut s2 = 0.0;
            for _ in 0..count {
                let v = g(&uniform_ball(&mut r, n))?;
                s += v;
                s2 += v * v;
            }
            Ok((s, s2))
        })
        .collect::<Result<_>>()?;
    let (s, s2) = sums.iter().fold((0.0, 0.0), |a, b| (a.0 + b.0, a.1 + b.1));
    let k = num_samples as f64;
    let mean = s / k;
    let var = ((s2 - k * mean * mean) / (k - 1.0)).max(0.0);
    Ok(MonteCarloEstimate {
        mean,
        std_error: (var / k).sqrt(),
        samples: num_samples,
    })
}

/// Monte Carlo estimate of `E[(h − ĥ)²]` under the uniform ball measure.
pub fn l2_error(
    h: &Polynomial,
    fhat: &LiftedPolynomial,
    split: &SpectrumSplit,
    num_samples: usize,
    seed: u64,
) -> Result<MonteCarloEstimate> {
    check_split(h, split)?;
    if num_samples < 10_000 {
        return Err(Error::InvalidArgument("l2_error needs at least 10^4 samples".into()));
    }
    ball_average(h.num_vars(), num_samples, seed, |x| {
        let d = h.eval(x) - hhat_eval(fhat, split, x)?;
        Ok(d * d)
    })
}
