//! Away-step Frank-Wolfe over a [`LinearOracle`] domain.

use rand::Rng;
use rand_distr::Exp1;

use super::{
    multi_start, LocalRun, Objective, PolyObjective, SolveOptions, SolveResult, SolveStatus,
    ARMIJO_C, ARMIJO_SHRINK,
};
use super::LinearOracle;
use crate::linalg::dot;
use crate::sampling::{gaussian_vec, stream_rng};
use crate::{Polynomial, Result};

/// Convex combination of oracle vertices.
pub(crate) type ActiveSet = Vec<(Vec<f64>, f64)>;

fn combine(active: &ActiveSet, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (v, w) in active {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += w * vi;
        }
    }
    x
}

fn same_vertex(a: &[f64], b: &[f64]) -> bool {
    a.iter().zip(b).all(|(x, y)| (x - y).abs() <= 1e-12 * (1.0 + x.abs()))
}

/// Random start: Dirichlet(1) weights over `dim + 1` oracle vertices drawn
/// with Gaussian objectives.
pub(crate) fn random_active_set(oracle: &dyn LinearOracle, seed: u64, index: usize) -> Result<ActiveSet> {
    let n = oracle.dim();
    let mut r = stream_rng(seed, index as u64);
    let mut active: ActiveSet = Vec::new();
    let mut total = 0.0;
    // support sizes cycle through 1..=n+1 so starts cover vertices, edges
    // and low-dimensional faces, not only the interior
    for _ in 0..=index % (n + 1) {
        let v = oracle.argmin_linear(&gaussian_vec(&mut r, n))?;
        let w: f64 = r.sample(Exp1);
        total += w;
        match active.iter_mut().find(|(u, _)| same_vertex(u, &v)) {
            Some(entry) => entry.1 += w,
            None => active.push((v, w)),
        }
    }
    for entry in &mut active {
        entry.1 /= total;
    }
    Ok(active)
}

const FIRST_STEP: f64 = 1.0 / 16.0;

/// Runs away-step Frank-Wolfe until the FW gap `−∇f·(s − x)` is `≤ tol`.
pub(crate) fn fw_local(
    obj: &dyn Objective,
    oracle: &dyn LinearOracle,
    mut active: ActiveSet,
    max_iter: usize,
    tol: f64,
    record: bool,
) -> Result<LocalRun> {
    let n = oracle.dim();
    let mut x = combine(&active, n);
    let mut fx = obj.value(&x);
    let mut trace = if record { vec![fx] } else { Vec::new() };
    // backtracking starts from twice the last accepted step, so early
    // iterations stay near the start instead of jumping to a vertex
    let mut step_hint = FIRST_STEP;
    for it in 0..max_iter {
        let g = obj.gradient(&x);
        let gx = dot(&g, &x);
        let s = oracle.argmin_linear(&g)?;
        let fw_gap = gx - dot(&g, &s);
        if fw_gap <= tol {
            return Ok(done(fx, x, SolveStatus::Converged, it, trace));
        }
        let (away_idx, away_gap) = active
            .iter()
            .enumerate()
            .map(|(i, (v, _))| (i, dot(&g, v) - gx))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("active set is never empty");
        let away_weight = active[away_idx].1;
        let use_fw = fw_gap >= away_gap || away_weight >= 1.0;
        let (dir, gamma_max): (Vec<f64>, f64) = if use_fw {
            (s.iter().zip(&x).map(|(a, b)| a - b).collect(), 1.0)
        } else {
            let v = &active[away_idx].0;
            (x.iter().zip(v).map(|(a, b)| a - b).collect(), away_weight / (1.0 - away_weight))
        };
        let slope = dot(&g, &dir);
        let mut gamma = gamma_max.min(2.0 * step_hint);
        let mut accepted = None;
        for _ in 0..60 {
            let xn: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + gamma * d).collect();
            let fn_ = obj.value(&xn);
            if fn_ <= fx + ARMIJO_C * gamma * slope {
                accepted = Some((xn, fn_));
                break;
            }
            gamma *= ARMIJO_SHRINK;
        }
        let Some((xn, fn_)) = accepted else {
            return Ok(done(fx, x, SolveStatus::Converged, it + 1, trace));
        };
        step_hint = gamma;
        // decrease below double precision: the gap cannot shrink further
        let precision_floor = fx - fn_ <= 4.0 * f64::EPSILON * fx.abs().max(1.0);
        if use_fw {
            for entry in &mut active {
                entry.1 *= 1.0 - gamma;
            }
            match active.iter_mut().find(|(u, _)| same_vertex(u, &s)) {
                Some(entry) => entry.1 += gamma,
                None => active.push((s, gamma)),
            }
        } else {
            for entry in &mut active {
                entry.1 *= 1.0 + gamma;
            }
            active[away_idx].1 -= gamma;
            if gamma >= gamma_max {
                active[away_idx].1 = 0.0;
            }
        }
        active.retain(|(_, w)| *w > 1e-15);
        x = xn;
        fx = fn_;
        if record {
            trace.push(fx);
        }
        if precision_floor {
            return Ok(done(fx, x, SolveStatus::Converged, it + 1, trace));
        }
    }
    Ok(done(fx, x, SolveStatus::MaxIter, max_iter, trace))
}

fn done(value: f64, point: Vec<f64>, status: SolveStatus, iterations: usize, trace: Vec<f64>) -> LocalRun {
    LocalRun {
        value,
        point,
        status,
        iterations,
        trace,
    }
}

pub fn minimize_polytope(p: &Polynomial, domain: &dyn LinearOracle, opts: &SolveOptions) -> Result<SolveResult> {
    minimize_polytope_with(&PolyObjective::new(p), domain, opts)
}

pub fn minimize_polytope_with(
    obj: &dyn Objective,
    domain: &dyn LinearOracle,
    opts: &SolveOptions,
) -> Result<SolveResult> {
    // surfaces empty or unbounded domains before spawning starts
    random_active_set(domain, opts.seed, 0)?;
    let result = multi_start(opts, |i| {
        random_active_set(domain, opts.seed, i)
            .and_then(|a| fw_local(obj, domain, a, opts.max_iter, opts.tol, opts.record_trace))
            .unwrap_or_else(|_| done(f64::INFINITY, vec![f64::NAN; domain.dim()], SolveStatus::Infeasible, 0, Vec::new()))
    });
    Ok(result)
}
