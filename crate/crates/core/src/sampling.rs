//! Seeded random sampling on the unit ball and sphere.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream `stream` derived from `seed`; used so that parallel
/// work items draw reproducible samples regardless of scheduling.
pub fn stream_rng(seed: u64, stream: u64) -> SeededRng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(stream);
    r
}

pub fn gaussian_vec<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.sample(StandardNormal)).collect()
}

/// Uniform point on the unit sphere `S^{n-1}`.
pub fn uniform_sphere<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let g = gaussian_vec(rng, n);
        let norm = g.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 {
            return g.into_iter().map(|v| v / norm).collect();
        }
    }
}

/// Uniform point in the unit ball: a uniform direction scaled by `U^{1/n}`.
pub fn uniform_ball<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    if n == 0 {
        return Vec::new();
    }
    let dir = uniform_sphere(rng, n);
    let u: f64 = rng.random();
    let r = u.powf(1.0 / n as f64);
    dir.into_iter().map(|v| v * r).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ball_samples_are_inside() {
        let mut r = rng(3);
        for n in 1..6 {
            for _ in 0..200 {
                let x = uniform_ball(&mut r, n);
                assert!(x.iter().map(|v| v * v).sum::<f64>() <= 1.0);
            }
        }
    }

    #[test]
    fn deterministic_per_seed() {
        let a: Vec<_> = (0..5).map(|_| uniform_ball(&mut rng(9), 4)).collect();
        let b: Vec<_> = (0..5).map(|_| uniform_ball(&mut rng(9), 4)).collect();
        assert_eq!(a, b);
        assert_ne!(uniform_ball(&mut stream_rng(9, 1), 4), uniform_ball(&mut stream_rng(9, 2), 4));
    }
}
