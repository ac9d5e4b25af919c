//! Reduction of `min f(ellᵀx)` over `Ω = {x ≥ 0 : Ax = b}` to an
//! `m`-dimensional problem over the projected set `{ellᵀx : x ∈ Ω}`.
//!
//! The projection is described by cuts `u·X ≤ λ·b` with `(λ, u)` in the
//! cone `{Aᵀλ ≥ ell·u}`. Cuts are generated lazily: minimize `f` over the
//! current outer polyhedron, then ask a separation LP whether the minimizer
//! lies in the projection. The canonical simplex and the box `[-1, 1]^n`
//! have closed-form projections and skip the general loop.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use crate::detection::SparseForm;
use crate::linalg::{dot, lp_solve, norm, DenseMatrix, LpProblem, LpStatus};
use crate::sampling::{gaussian_vec, rng};
use crate::solvers::{
    minimize_polytope, LinearOracle, Polyhedron, SolveOptions, SolveStatus, VertexHull, Zonotope,
};
use crate::{Error, Result};

/// Stop once the separation value is at least `-SEPARATION_TOL`.
pub const SEPARATION_TOL: f64 = 1e-8;
pub const DEFAULT_MAX_CUT_ITERS: usize = 50;

/// `Ω = {x ∈ ℝⁿ : x ≥ 0, Ax = b}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolytopeJson")]
pub struct Polytope {
    #[serde(rename = "A")]
    pub a: DenseMatrix,
    pub b: Vec<f64>,
}

#[derive(Deserialize)]
struct PolytopeJson {
    #[serde(rename = "A")]
    a: DenseMatrix,
    b: Vec<f64>,
}

impl TryFrom<PolytopeJson> for Polytope {
    type Error = Error;
    fn try_from(j: PolytopeJson) -> Result<Self> {
        Self::new(j.a, j.b)
    }
}

impl Polytope {
    /// Checks dimensions and nonemptiness.
    pub fn new(a: DenseMatrix, b: Vec<f64>) -> Result<Self> {
        if a.nrows() != b.len() {
            return Err(Error::DimensionMismatch {
                expected: a.nrows(),
                got: b.len(),
            });
        }
        let p = Self { a, b };
        p.polyhedron().feasible_point()?;
        Ok(p)
    }

    /// `{x ≥ 0 : Σx = 1}`.
    pub fn canonical_simplex(n: usize) -> Self {
        Self {
            a: DenseMatrix::from_row_major(1, n, vec![1.0; n]).expect("1×n"),
            b: vec![1.0],
        }
    }

    pub fn n(&self) -> usize {
        self.a.ncols()
    }

    pub fn s(&self) -> usize {
        self.a.nrows()
    }

    pub fn polyhedron(&self) -> Polyhedron {
        let mut p = Polyhedron {
            lower: vec![Some(0.0); self.n()],
            ..Polyhedron::free(self.n())
        };
        for i in 0..self.s() {
            p.add_eq(self.a.row(i).to_vec(), self.b[i]);
        }
        p
    }

    /// Random points of `Ω`: convex combinations of LP vertices found with
    /// random objectives.
    pub fn sample_points(&self, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
        sample_from_oracle(&self.polyhedron(), count, seed)
    }
}

pub(crate) fn sample_from_oracle(oracle: &dyn LinearOracle, count: usize, seed: u64) -> Result<Vec<Vec<f64>>> {
    let n = oracle.dim();
    let mut r = rng(seed);
    let vertices = (0..(2 * n + 2))
        .map(|_| oracle.argmin_linear(&gaussian_vec(&mut r, n)))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..count)
        .map(|_| {
            let w: Vec<f64> = (0..vertices.len()).map(|_| r.sample::<f64, _>(Exp1)).collect();
            let total: f64 = w.iter().sum();
            let mut x = vec![0.0; n];
            for (v, wi) in vertices.iter().zip(&w) {
                for (xi, vi) in x.iter_mut().zip(v) {
                    *xi += wi / total * vi;
                }
            }
            x
        })
        .collect())
}

/// Valid inequality `u·X ≤ rhs` for the projected set. For the general
/// polytope `rhs = λ·b`; for the box `lambda` is empty and
/// `rhs = ‖ell·u‖₁`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cut {
    pub lambda: Vec<f64>,
    pub u: Vec<f64>,
    pub rhs: f64,
}

impl Cut {
    pub fn violation(&self, point: &[f64]) -> f64 {
        dot(&self.u, point) - self.rhs
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CutSet {
    pub cuts: Vec<Cut>,
}

impl CutSet {
    /// `{X : u_i·X ≤ rhs_i} ∩ [lower, upper]`.
    pub fn polyhedron(&self, lower: &[f64], upper: &[f64]) -> Polyhedron {
        let mut p = Polyhedron::free(lower.len()).with_bounds(lower.to_vec(), upper.to_vec());
        for c in &self.cuts {
            p.add_leq(c.u.clone(), c.rhs);
        }
        p
    }

    pub fn max_violation(&self, point: &[f64]) -> f64 {
        self.cuts.iter().map(|c| c.violation(point)).fold(f64::NEG_INFINITY, f64::max)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Separation {
    /// `min λ·b − u·X` over the normalized cone section; `≥ -tol` means
    /// `X` lies in the projection.
    pub tau: f64,
    pub cut: Cut,
}

/// Most violated normalized cut at `point`.
pub fn separation_lp(poly: &Polytope, ell: &DenseMatrix, point: &[f64]) -> Result<Separation> {
    let (s, n, m) = (poly.s(), poly.n(), ell.ncols());
    if ell.nrows() != n || point.len() != m {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: ell.nrows(),
        });
    }
    // variables: λ⁺ (s), λ⁻ (s), u⁺ (m), u⁻ (m)
    let width = 2 * s + 2 * m;
    let mut objective = Vec::with_capacity(width);
    objective.extend_from_slice(&poly.b);
    objective.extend(poly.b.iter().map(|v| -v));
    objective.extend(point.iter().map(|v| -v));
    objective.extend_from_slice(point);
    let mut lp = LpProblem::new(objective).eq(vec![1.0; width], 1.0);
    for k in 0..n {
        // (Aᵀλ)_k − (ell·u)_k ≥ 0
        let mut row = Vec::with_capacity(width);
        let a_col: Vec<f64> = (0..s).map(|i| poly.a[(i, k)]).collect();
        row.extend_from_slice(&a_col);
        row.extend(a_col.iter().map(|v| -v));
        row.extend(ell.row(k).iter().map(|v| -v));
        row.extend_from_slice(ell.row(k));
        lp = lp.geq(row, 0.0);
    }
    let r = lp_solve(&lp)?;
    if r.status != LpStatus::Optimal {
        return Err(Error::DegenerateCone);
    }
    let lambda: Vec<f64> = (0..s).map(|i| r.x[i] - r.x[s + i]).collect();
    let u: Vec<f64> = (0..m).map(|j| r.x[2 * s + j] - r.x[2 * s + m + j]).collect();
    let rhs = dot(&lambda, &poly.b);
    Ok(Separation {
        tau: r.value,
        cut: Cut { lambda, u, rhs },
    })
}

/// Support function of the projected box: `max_{x ∈ [-1,1]ⁿ} u·ellᵀx = ‖ell·u‖₁`.
pub fn box_support(ell: &DenseMatrix, u: &[f64]) -> Result<f64> {
    Ok(ell.matvec(u)?.iter().map(|v| v.abs()).sum())
}

/// Most violated normalized box cut `u·X ≤ ‖ell·u‖₁` with `‖u‖₁ = 1`.
pub fn box_separation(ell: &DenseMatrix, point: &[f64]) -> Result<Separation> {
    let (n, m) = ell.shape();
    if point.len() != m {
        return Err(Error::DimensionMismatch {
            expected: m,
            got: point.len(),
        });
    }
    // variables: u⁺ (m), u⁻ (m), t (n) with t ≥ |ell·u|
    let width = 2 * m + n;
    let mut objective: Vec<f64> = point.iter().map(|v| -v).collect();
    objective.extend_from_slice(point);
    objective.extend(std::iter::repeat_n(1.0, n));
    let mut norm_row = vec![1.0; 2 * m];
    norm_row.extend(std::iter::repeat_n(0.0, n));
    let mut lp = LpProblem::new(objective).eq(norm_row, 1.0);
    for k in 0..n {
        let mut row = Vec::with_capacity(width);
        row.extend_from_slice(ell.row(k));
        row.extend(ell.row(k).iter().map(|v| -v));
        let mut t = vec![0.0; n];
        t[k] = -1.0;
        row.extend_from_slice(&t);
        let neg: Vec<f64> = row[..2 * m].iter().map(|v| -v).chain(t.iter().copied()).collect();
        lp = lp.leq(row, 0.0).leq(neg, 0.0);
    }
    let r = lp_solve(&lp)?;
    if r.status != LpStatus::Optimal {
        return Err(Error::DegenerateCone);
    }
    let u: Vec<f64> = (0..m).map(|j| r.x[j] - r.x[m + j]).collect();
    let rhs = box_support(ell, &u)?;
    Ok(Separation {
        tau: rhs - dot(&u, point),
        cut: Cut {
            lambda: Vec::new(),
            u,
            rhs,
        },
    })
}

/// Images of the simplex vertices: the rows of `ell`.
pub fn simplex_projection(ell: &DenseMatrix) -> Vec<Vec<f64>> {
    ell.to_rows()
}

/// `Ω = [-1, 1]ⁿ` rewritten as `{z ≥ 0 : Az = b}` with
/// `z = (x⁺, x⁻, s⁺, s⁻)`, `x = x⁺ − x⁻`, `x± + s± = 1`, together with the
/// matching `4n × m` direction matrix.
pub fn box_standard_form(ell: &DenseMatrix) -> (Polytope, DenseMatrix) {
    let (n, m) = ell.shape();
    let mut a = DenseMatrix::zeros(2 * n, 4 * n);
    for i in 0..n {
        a[(i, i)] = 1.0;
        a[(i, 2 * n + i)] = 1.0;
        a[(n + i, n + i)] = 1.0;
        a[(n + i, 3 * n + i)] = 1.0;
    }
    let mut lifted = DenseMatrix::zeros(4 * n, m);
    for i in 0..n {
        for j in 0..m {
            lifted[(i, j)] = ell[(i, j)];
            lifted[(n + i, j)] = -ell[(i, j)];
        }
    }
    (
        Polytope {
            a,
            b: vec![1.0; 2 * n],
        },
        lifted,
    )
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum PolytopeDomain {
    Standard(Polytope),
    Simplex { n: usize },
    /// `[-1, 1]ⁿ`, separated with [`box_support`] cuts.
    Box { n: usize },
}

impl PolytopeDomain {
    pub fn n(&self) -> usize {
        match self {
            PolytopeDomain::Standard(p) => p.n(),
            PolytopeDomain::Simplex { n } | PolytopeDomain::Box { n } => *n,
        }
    }

    /// The domain in `x`-space.
    pub fn polyhedron(&self) -> Polyhedron {
        match self {
            PolytopeDomain::Standard(p) => p.polyhedron(),
            PolytopeDomain::Simplex { n } => Polytope::canonical_simplex(*n).polyhedron(),
            PolytopeDomain::Box { n } => Polyhedron::cube(*n, 1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PolytopeReduction {
    /// Minimum of `f` over the final outer polyhedron.
    pub rho: f64,
    #[serde(rename = "X_star")]
    pub reduced_point: Vec<f64>,
    /// A point of `Ω` with `ellᵀx` closest (in ℓ₁) to the reduced point.
    pub point: Vec<f64>,
    pub cuts: CutSet,
    pub iterations: usize,
    pub status: SolveStatus,
    /// Separation value after each outer solve.
    pub tau_history: Vec<f64>,
    /// Minimum over each successive outer polyhedron.
    pub rho_history: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CutLoopOptions {
    pub solve: SolveOptions,
    pub max_iter: usize,
    pub tol: f64,
}

impl Default for CutLoopOptions {
    fn default() -> Self {
        Self {
            solve: SolveOptions::default(),
            max_iter: DEFAULT_MAX_CUT_ITERS,
            tol: SEPARATION_TOL,
        }
    }
}

/// Cut generation over a general standard-form polytope.
pub fn cut_loop(sf: &SparseForm, poly: &Polytope, opts: &CutLoopOptions) -> Result<PolytopeReduction> {
    check_dims(sf, poly.n())?;
    let omega = poly.polyhedron();
    omega.bounding_box()?;
    let (lower, upper) = projected_ranges(&omega, &sf.ell)?;
    let outcome = generic_loop(sf, &lower, &upper, opts, |x| separation_lp(poly, &sf.ell, x))?;
    finish(sf, &omega, outcome)
}

/// Cut generation over `[-1, 1]ⁿ` with support-function cuts.
pub fn box_cut_loop(sf: &SparseForm, opts: &CutLoopOptions) -> Result<PolytopeReduction> {
    let n = sf.n();
    let ranges: Vec<f64> = sf
        .ell
        .columns()
        .iter()
        .map(|c| c.iter().map(|v| v.abs()).sum())
        .collect();
    let lower: Vec<f64> = ranges.iter().map(|r| -r).collect();
    let outcome = generic_loop(sf, &lower, &ranges, opts, |x| box_separation(&sf.ell, x))?;
    finish(sf, &Polyhedron::cube(n, 1.0), outcome)
}

/// Minimizes over the exact projection of the simplex (hull of the rows of `ell`).
pub fn simplex_reduce(sf: &SparseForm, opts: &SolveOptions) -> Result<PolytopeReduction> {
    let hull = VertexHull::new(sf.m(), simplex_projection(&sf.ell))?;
    direct(sf, &hull, &Polytope::canonical_simplex(sf.n()).polyhedron(), opts)
}

/// Minimizes over the exact projection of the box (a zonotope).
pub fn box_reduce(sf: &SparseForm, opts: &SolveOptions) -> Result<PolytopeReduction> {
    let zono = Zonotope { ell: sf.ell.clone() };
    direct(sf, &zono, &Polyhedron::cube(sf.n(), 1.0), opts)
}

/// Dispatches on the domain kind: the simplex uses its vertex images, the
/// box and general polytopes use cut generation.
pub fn reduce_polytope(sf: &SparseForm, domain: &PolytopeDomain, opts: &CutLoopOptions) -> Result<PolytopeReduction> {
    check_dims(sf, domain.n())?;
    match domain {
        PolytopeDomain::Standard(p) => cut_loop(sf, p, opts),
        PolytopeDomain::Simplex { .. } => simplex_reduce(sf, &opts.solve),
        PolytopeDomain::Box { .. } => box_cut_loop(sf, opts),
    }
}

fn check_dims(sf: &SparseForm, n: usize) -> Result<()> {
    if sf.n() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: sf.n(),
        });
    }
    Ok(())
}

/// Ranges of `ell_jᵀx` over `Ω`.
fn projected_ranges(omega: &Polyhedron, ell: &DenseMatrix) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lower = Vec::with_capacity(ell.ncols());
    let mut upper = Vec::with_capacity(ell.ncols());
    for c in ell.columns() {
        lower.push(dot(&c, &omega.argmin_linear(&c)?));
        let neg: Vec<f64> = c.iter().map(|v| -v).collect();
        upper.push(dot(&c, &omega.argmin_linear(&neg)?));
    }
    Ok((lower, upper))
}

struct LoopOutcome {
    rho: f64,
    reduced_point: Vec<f64>,
    cuts: CutSet,
    iterations: usize,
    status: SolveStatus,
    tau_history: Vec<f64>,
    rho_history: Vec<f64>,
}

fn generic_loop<S>(
    sf: &SparseForm,
    lower: &[f64],
    upper: &[f64],
    opts: &CutLoopOptions,
    separate: S,
) -> Result<LoopOutcome>
where
    S: Fn(&[f64]) -> Result<Separation>,
{
    let m = sf.m();
    let mut cuts = CutSet::default();
    let initial = separate(&vec![0.0; m])?;
    if norm(&initial.cut.u) > 1e-12 {
        cuts.cuts.push(initial.cut);
    }
    let mut tau_history = Vec::new();
    let mut rho_history = Vec::new();
    let mut last = None;
    for k in 0..opts.max_iter {
        let outer = cuts.polyhedron(lower, upper);
        let sol = minimize_polytope(&sf.f, &outer, &opts.solve)?;
        let sep = separate(&sol.point)?;
        tau_history.push(sep.tau);
        rho_history.push(sol.value);
        if sep.tau >= -opts.tol {
            return Ok(LoopOutcome {
                rho: sol.value,
                reduced_point: sol.point,
                cuts,
                iterations: k + 1,
                status: SolveStatus::Converged,
                tau_history,
                rho_history,
            });
        }
        cuts.cuts.push(sep.cut);
        last = Some(sol);
    }
    let sol = last.expect("at least one iteration ran");
    Ok(LoopOutcome {
        rho: sol.value,
        reduced_point: sol.point,
        cuts,
        iterations: opts.max_iter,
        status: SolveStatus::MaxIter,
        tau_history,
        rho_history,
    })
}

fn finish(sf: &SparseForm, omega: &Polyhedron, out: LoopOutcome) -> Result<PolytopeReduction> {
    let point = lift_to_domain(omega, &sf.ell, &out.reduced_point)?;
    Ok(PolytopeReduction {
        rho: out.rho,
        reduced_point: out.reduced_point,
        point,
        cuts: out.cuts,
        iterations: out.iterations,
        status: out.status,
        tau_history: out.tau_history,
        rho_history: out.rho_history,
    })
}

fn direct(sf: &SparseForm, oracle: &dyn LinearOracle, omega: &Polyhedron, opts: &SolveOptions) -> Result<PolytopeReduction> {
    let sol = minimize_polytope(&sf.f, oracle, opts)?;
    let point = lift_to_domain(omega, &sf.ell, &sol.point)?;
    Ok(PolytopeReduction {
        rho: sol.value,
        reduced_point: sol.point,
        point,
        cuts: CutSet::default(),
        iterations: sol.iterations,
        status: sol.status,
        tau_history: Vec::new(),
        rho_history: Vec::new(),
    })
}

/// `argmin_{x ∈ Ω} ‖ellᵀx − target‖₁`.
pub fn lift_to_domain(omega: &Polyhedron, ell: &DenseMatrix, target: &[f64]) -> Result<Vec<f64>> {
    let (n, m) = ell.shape();
    let width = n + 2 * m;
    let mut objective = vec![0.0; n];
    objective.extend(std::iter::repeat_n(1.0, 2 * m));
    let pad = |row: &[f64]| {
        let mut r = row.to_vec();
        r.resize(width, 0.0);
        r
    };
    let mut lp = LpProblem::new(objective);
    lp.lower[..n].copy_from_slice(&omega.lower);
    lp.upper[..n].copy_from_slice(&omega.upper);
    for (row, &b) in omega.ineq_rows.iter().zip(&omega.ineq_rhs) {
        lp = lp.leq(pad(row), b);
    }
    for (row, &b) in omega.eq_rows.iter().zip(&omega.eq_rhs) {
        lp = lp.eq(pad(row), b);
    }
    for j in 0..m {
        let mut row = ell.column(j);
        row.resize(width, 0.0);
        row[n + j] = -1.0;
        row[n + m + j] = 1.0;
        lp = lp.eq(row, target[j]);
    }
    let r = lp_solve(&lp)?;
    match r.status {
        LpStatus::Optimal => Ok(r.x[..n].to_vec()),
        _ => Err(Error::EmptyPolytope),
    }
}
