//! Sampling oracle: dense random sampling of the domain followed by a short
//! local polish of the best samples. Intended for small dimensions only.

use rand::Rng;
use rand_distr::Exp1;
use serde::{Deserialize, Serialize};

use super::frank_wolfe::{fw_local, ActiveSet};
use super::projected::{local_descent, Manifold};
use super::{LinearOracle, Objective, PolyObjective, SphereHalf};
use crate::sampling::{gaussian_vec, rng, uniform_ball, uniform_sphere};
use crate::{Error, Polynomial, Result};

/// Largest dimension the oracle accepts.
pub const MAX_BRUTE_DIM: usize = 12;

#[derive(Clone, Copy)]
pub enum BruteDomain<'a> {
    Ball(usize),
    Sphere(usize),
    Linear(&'a dyn LinearOracle),
}

impl BruteDomain<'_> {
    fn dim(&self) -> usize {
        match self {
            BruteDomain::Ball(n) | BruteDomain::Sphere(n) => *n,
            BruteDomain::Linear(o) => o.dim(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BruteForceOptions {
    /// Number of random samples.
    pub resolution: usize,
    pub polish_starts: usize,
    pub polish_steps: usize,
    pub seed: u64,
}

impl Default for BruteForceOptions {
    fn default() -> Self {
        Self {
            resolution: 20_000,
            polish_starts: 10,
            polish_steps: 50,
            seed: 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BruteForceResult {
    pub value: f64,
    pub point: Vec<f64>,
}

pub fn brute_force_min(p: &Polynomial, domain: BruteDomain<'_>, resolution: usize, seed: u64) -> Result<f64> {
    let opts = BruteForceOptions {
        resolution,
        seed,
        ..BruteForceOptions::default()
    };
    Ok(brute_force_min_with(&PolyObjective::new(p), domain, &opts)?.value)
}

pub fn brute_force_min_with(
    obj: &dyn Objective,
    domain: BruteDomain<'_>,
    opts: &BruteForceOptions,
) -> Result<BruteForceResult> {
    let n = domain.dim();
    if obj.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: obj.dim(),
        });
    }
    if n > MAX_BRUTE_DIM {
        return Err(Error::DimensionTooLarge(n));
    }
    if opts.resolution == 0 {
        return Err(Error::InvalidArgument("resolution must be positive".into()));
    }
    let mut r = rng(opts.seed);
    match domain {
        BruteDomain::Ball(_) | BruteDomain::Sphere(_) => {
            let manifold = match domain {
                BruteDomain::Ball(_) => Manifold::Ball,
                _ => Manifold::Sphere(SphereHalf::Full),
            };
            let mut samples: Vec<(f64, Vec<f64>)> = (0..opts.resolution)
                .map(|i| {
                    // half of the ball samples sit on the boundary sphere
                    let x = match domain {
                        BruteDomain::Ball(_) if i % 2 == 0 => uniform_ball(&mut r, n),
                        _ => uniform_sphere(&mut r, n),
                    };
                    (obj.value(&x), x)
                })
                .collect();
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut best = BruteForceResult {
                value: samples[0].0,
                point: samples[0].1.clone(),
            };
            for (_, x) in samples.into_iter().take(opts.polish_starts) {
                let run = local_descent(obj, manifold, x, opts.polish_steps, 0.0, false);
                if run.value < best.value {
                    best = BruteForceResult {
                        value: run.value,
                        point: run.point,
                    };
                }
            }
            Ok(best)
        }
        BruteDomain::Linear(oracle) => {
            let pool_size = (opts.resolution / 20).clamp(n + 1, 400);
            let mut pool: Vec<Vec<f64>> = Vec::new();
            for _ in 0..pool_size {
                let v = oracle.argmin_linear(&gaussian_vec(&mut r, n))?;
                if !pool.iter().any(|u| u.iter().zip(&v).all(|(a, b)| (a - b).abs() < 1e-12)) {
                    pool.push(v);
                }
            }
            let mut samples: Vec<(f64, ActiveSet)> = Vec::with_capacity(opts.resolution + pool.len());
            for v in &pool {
                samples.push((obj.value(v), vec![(v.clone(), 1.0)]));
            }
            for _ in 0..opts.resolution {
                let k = r.random_range(1..=(n + 1).min(pool.len()));
                let mut active: ActiveSet = Vec::with_capacity(k);
                let mut total = 0.0;
                for _ in 0..k {
                    let v = &pool[r.random_range(0..pool.len())];
                    let w: f64 = r.sample(Exp1);
                    total += w;
                    active.push((v.clone(), w));
                }
                for e in &mut active {
                    e.1 /= total;
                }
                let x = point_of(&active, n);
                samples.push((obj.value(&x), active));
            }
            samples.sort_by(|a, b| a.0.total_cmp(&b.0));
            let mut best = BruteForceResult {
                value: samples[0].0,
                point: point_of(&samples[0].1, n),
            };
            for (_, active) in samples.into_iter().take(opts.polish_starts) {
                let run = fw_local(obj, oracle, active, opts.polish_steps, 0.0, false)?;
                if run.value < best.value {
                    best = BruteForceResult {
                        value: run.value,
                        point: run.point,
                    };
                }
            }
            Ok(best)
        }
    }
}

fn point_of(active: &ActiveSet, n: usize) -> Vec<f64> {
    let mut x = vec![0.0; n];
    for (v, w) in active {
        for (xi, vi) in x.iter_mut().zip(v) {
            *xi += w * vi;
        }
    }
    x
}
