//! Multi-start projected gradient descent with Armijo backtracking on the
//! unit ball and the unit (half-)sphere.

use serde::{Deserialize, Serialize};

use super::{
    multi_start, LocalRun, Objective, PolyObjective, SolveOptions, SolveResult, SolveStatus,
    ARMIJO_C, ARMIJO_SHRINK, ARMIJO_STEP,
};
use crate::linalg::{dot, norm};
use crate::sampling::{stream_rng, uniform_ball, uniform_sphere};
use crate::Polynomial;

/// Restriction of the sphere by the sign of its last coordinate.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum SphereHalf {
    #[default]
    #[serde(rename = "none")]
    Full,
    #[serde(rename = "y_nonneg")]
    LastNonneg,
    #[serde(rename = "y_nonpos")]
    LastNonpos,
}

#[derive(Clone, Copy, Debug)]
pub(crate) enum Manifold {
    Ball,
    Sphere(SphereHalf),
}

impl Manifold {
    pub(crate) fn project(self, z: &[f64]) -> Vec<f64> {
        match self {
            Manifold::Ball => {
                let r = norm(z);
                if r > 1.0 {
                    z.iter().map(|v| v / r).collect()
                } else {
                    z.to_vec()
                }
            }
            Manifold::Sphere(half) => {
                let mut y = z.to_vec();
                if let Some(last) = y.last_mut() {
                    match half {
                        SphereHalf::LastNonneg if *last < 0.0 => *last = 0.0,
                        SphereHalf::LastNonpos if *last > 0.0 => *last = 0.0,
                        _ => {}
                    }
                }
                let r = norm(&y);
                if r < 1e-300 {
                    // antipodal to the half: any boundary point is a projection
                    let mut e = vec![0.0; y.len()];
                    if let Some(first) = e.first_mut() {
                        *first = 1.0;
                    }
                    if e.len() == 1 {
                        e[0] = if matches!(half, SphereHalf::LastNonpos) { -1.0 } else { 1.0 };
                    }
                    return e;
                }
                y.iter().map(|v| v / r).collect()
            }
        }
    }

    fn direction(self, x: &[f64], g: &[f64]) -> Vec<f64> {
        match self {
            Manifold::Ball => g.to_vec(),
            Manifold::Sphere(_) => {
                let gx = dot(g, x);
                g.iter().zip(x).map(|(gi, xi)| gi - gx * xi).collect()
            }
        }
    }

    fn start(self, seed: u64, index: usize, n: usize) -> Vec<f64> {
        let mut r = stream_rng(seed, index as u64);
        match self {
            Manifold::Ball => uniform_ball(&mut r, n),
            Manifold::Sphere(_) => self.project(&uniform_sphere(&mut r, n)),
        }
    }
}

/// Projected gradient from `x0` until `‖x − P(x − d)‖ ≤ tol`, where `d` is
/// the (Riemannian on the sphere) gradient.
pub(crate) fn local_descent(
    obj: &dyn Objective,
    manifold: Manifold,
    x0: Vec<f64>,
    max_iter: usize,
    tol: f64,
    record: bool,
) -> LocalRun {
    let mut x = manifold.project(&x0);
    let mut fx = obj.value(&x);
    let mut trace = if record { vec![fx] } else { Vec::new() };
    // previous point and direction, for the Barzilai-Borwein trial step
    let mut last: Option<(Vec<f64>, Vec<f64>)> = None;
    for it in 0..max_iter {
        let g = obj.gradient(&x);
        let d = manifold.direction(&x, &g);
        let full: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - b).collect();
        let stationarity = norm(
            &x.iter()
                .zip(manifold.project(&full))
                .map(|(a, b)| a - b)
                .collect::<Vec<_>>(),
        );
        if stationarity <= tol {
            return finish(fx, x, SolveStatus::Converged, it, trace);
        }
        let mut t = last.as_ref().map_or(ARMIJO_STEP, |(x_prev, d_prev)| bb_step(&x, x_prev, &d, d_prev));
        let mut accepted = None;
        for _ in 0..60 {
            let trial: Vec<f64> = x.iter().zip(&d).map(|(a, b)| a - t * b).collect();
            let xn = manifold.project(&trial);
            let predicted: f64 = g.iter().zip(xn.iter().zip(&x)).map(|(gi, (a, b))| gi * (a - b)).sum();
            let fn_ = obj.value(&xn);
            if predicted < 0.0 && fn_ <= fx + ARMIJO_C * predicted {
                accepted = Some((xn, fn_));
                break;
            }
            t *= ARMIJO_SHRINK;
        }
        match accepted {
            Some((xn, fn_)) => {
                last = Some((std::mem::replace(&mut x, xn), d));
                fx = fn_;
                if record {
                    trace.push(fx);
                }
            }
            // no representable decrease left
            None => return finish(fx, x, SolveStatus::Converged, it + 1, trace),
        }
    }
    finish(fx, x, SolveStatus::MaxIter, max_iter, trace)
}

/// `sᵀs / sᵀy` with `s` the last move and `y` the change in direction;
/// falls back to the unit step under non-positive curvature.
fn bb_step(x: &[f64], x_prev: &[f64], d: &[f64], d_prev: &[f64]) -> f64 {
    let s: Vec<f64> = x.iter().zip(x_prev).map(|(a, b)| a - b).collect();
    let y: Vec<f64> = d.iter().zip(d_prev).map(|(a, b)| a - b).collect();
    let sy = dot(&s, &y);
    if sy > 0.0 {
        (dot(&s, &s) / sy).clamp(1e-8, 1e8)
    } else {
        ARMIJO_STEP
    }
}

fn finish(value: f64, point: Vec<f64>, status: SolveStatus, iterations: usize, trace: Vec<f64>) -> LocalRun {
    LocalRun {
        value,
        point,
        status,
        iterations,
        trace,
    }
}

fn minimize_on(obj: &dyn Objective, manifold: Manifold, opts: &SolveOptions) -> SolveResult {
    let n = obj.dim();
    multi_start(opts, |i| {
        let x0 = manifold.start(opts.seed, i, n);
        local_descent(obj, manifold, x0, opts.max_iter, opts.tol, opts.record_trace)
    })
}

pub fn minimize_ball(p: &Polynomial, opts: &SolveOptions) -> SolveResult {
    minimize_ball_with(&PolyObjective::new(p), opts)
}

pub fn minimize_ball_with(obj: &dyn Objective, opts: &SolveOptions) -> SolveResult {
    minimize_on(obj, Manifold::Ball, opts)
}

pub fn minimize_sphere(p: &Polynomial, opts: &SolveOptions, half: SphereHalf) -> SolveResult {
    minimize_sphere_with(&PolyObjective::new(p), opts, half)
}

pub fn minimize_sphere_with(obj: &dyn Objective, opts: &SolveOptions, half: SphereHalf) -> SolveResult {
    minimize_on(obj, Manifold::Sphere(half), opts)
}
