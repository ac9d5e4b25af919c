//! Desk-scale local minimization over the ball, the (half-)sphere and
//! polyhedra, plus a sampling oracle used to cross-check the reductions.
//!
//! All solvers are multi-start local methods. Start `i` draws from its own
//! random stream derived from the seed, so runs are bitwise reproducible
//! regardless of how rayon schedules the starts.

mod brute;
mod domain;
mod frank_wolfe;
mod projected;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::Polynomial;

pub use brute::{brute_force_min, brute_force_min_with, BruteDomain, BruteForceOptions, BruteForceResult};
pub use domain::{LinearOracle, Polyhedron, VertexHull, Zonotope};
pub use frank_wolfe::{minimize_polytope, minimize_polytope_with};
pub use projected::{minimize_ball, minimize_ball_with, minimize_sphere, minimize_sphere_with, SphereHalf};

/// Armijo backtracking: first trial step.
pub const ARMIJO_STEP: f64 = 1.0;
/// Armijo backtracking: shrink factor.
pub const ARMIJO_SHRINK: f64 = 0.5;
/// Armijo backtracking: sufficient-decrease constant.
pub const ARMIJO_C: f64 = 1e-4;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolveOptions {
    pub starts: usize,
    pub max_iter: usize,
    /// Stationarity tolerance (projected-gradient norm or Frank-Wolfe gap).
    pub tol: f64,
    pub seed: u64,
    /// Keep the per-start objective sequence in [`SolveResult::traces`].
    pub record_trace: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            starts: 32,
            max_iter: 500,
            tol: 1e-9,
            seed: 0,
            record_trace: false,
        }
    }
}

impl SolveOptions {
    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SolveStatus {
    Converged,
    MaxIter,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolveResult {
    pub value: f64,
    pub point: Vec<f64>,
    pub status: SolveStatus,
    /// Iterations of the winning start.
    pub iterations: usize,
    pub starts_used: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub traces: Vec<Vec<f64>>,
}

/// A differentiable objective on `ℝ^dim`.
pub trait Objective: Sync {
    fn dim(&self) -> usize;
    fn value(&self, x: &[f64]) -> f64;
    fn gradient(&self, x: &[f64]) -> Vec<f64>;
}

/// Polynomial objective with a precomputed symbolic gradient.
pub struct PolyObjective<'a> {
    p: &'a Polynomial,
    grad: Vec<Polynomial>,
}

impl<'a> PolyObjective<'a> {
    pub fn new(p: &'a Polynomial) -> Self {
        Self {
            p,
            grad: p.gradient(),
        }
    }
}

impl Objective for PolyObjective<'_> {
    fn dim(&self) -> usize {
        self.p.num_vars()
    }
    fn value(&self, x: &[f64]) -> f64 {
        self.p.eval(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        self.grad.iter().map(|g| g.eval(x)).collect()
    }
}

/// Closure objective with a central-difference gradient.
pub struct FnObjective<F> {
    dim: usize,
    f: F,
    step: f64,
}

impl<F: Fn(&[f64]) -> f64 + Sync> FnObjective<F> {
    pub fn new(dim: usize, f: F) -> Self {
        Self { dim, f, step: 1e-7 }
    }
}

impl<F: Fn(&[f64]) -> f64 + Sync> Objective for FnObjective<F> {
    fn dim(&self) -> usize {
        self.dim
    }
    fn value(&self, x: &[f64]) -> f64 {
        (self.f)(x)
    }
    fn gradient(&self, x: &[f64]) -> Vec<f64> {
        let mut y = x.to_vec();
        (0..self.dim)
            .map(|i| {
                y[i] = x[i] + self.step;
                let up = (self.f)(&y);
                y[i] = x[i] - self.step;
                let down = (self.f)(&y);
                y[i] = x[i];
                (up - down) / (2.0 * self.step)
            })
            .collect()
    }
}

/// Outcome of one local run.
pub(crate) struct LocalRun {
    pub value: f64,
    pub point: Vec<f64>,
    pub status: SolveStatus,
    pub iterations: usize,
    pub trace: Vec<f64>,
}

/// Runs `starts` local searches (doubling once when the two best values
/// disagree by more than 1e-4) and keeps the best by `(value, point)`.
pub(crate) fn multi_start<F>(opts: &SolveOptions, run: F) -> SolveResult
where
    F: Fn(usize) -> LocalRun + Sync,
{
    let starts = opts.starts.max(1);
    let mut runs: Vec<LocalRun> = (0..starts).into_par_iter().map(&run).collect();
    runs.sort_by(compare_runs);
    let disagree = runs.len() >= 2 && (runs[1].value - runs[0].value).abs() > 1e-4;
    if disagree {
        let mut more: Vec<LocalRun> = (starts..2 * starts).into_par_iter().map(&run).collect();
        runs.append(&mut more);
        runs.sort_by(compare_runs);
    }
    let starts_used = runs.len();
    let traces = if opts.record_trace {
        runs.iter().map(|r| r.trace.clone()).collect()
    } else {
        Vec::new()
    };
    let best = runs.swap_remove(0);
    SolveResult {
        value: best.value,
        point: best.point,
        status: best.status,
        iterations: best.iterations,
        starts_used,
        traces,
    }
}

fn compare_runs(a: &LocalRun, b: &LocalRun) -> std::cmp::Ordering {
    a.value.total_cmp(&b.value).then_with(|| {
        a.point
            .iter()
            .zip(&b.point)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    })
}
