//! Random test instances `h = f₀(ell₀ᵀx) + ε·g₀` with known ground truth.

use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::detection::SparseForm;
use crate::linalg::{orthonormalize, DenseMatrix};
use crate::poly::monomials_up_to;
use crate::sampling::{gaussian_vec, rng, SeededRng};
use crate::{Error, Polynomial, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct InstanceSpec {
    pub n: usize,
    pub m: usize,
    pub degree: u32,
    pub epsilon: f64,
    pub seed: u64,
    /// Orthonormalize `ell₀` (otherwise raw Gaussian columns).
    pub orthonormal: bool,
}

impl Default for InstanceSpec {
    fn default() -> Self {
        Self {
            n: 4,
            m: 1,
            degree: 3,
            epsilon: 0.0,
            seed: 0,
            orthonormal: true,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub h: Polynomial,
    pub truth: SparseForm,
    pub perturbation: Polynomial,
    pub epsilon: f64,
    pub spec: InstanceSpec,
}

/// Dense polynomial with standard normal coefficients on every monomial of
/// degree `1..=degree` in `num_vars` variables.
pub fn random_dense(r: &mut SeededRng, num_vars: usize, degree: u32) -> Polynomial {
    let terms: Vec<(Vec<u32>, f64)> = monomials_up_to(num_vars, degree)
        .into_iter()
        .filter(|e| e.iter().any(|&k| k > 0))
        .map(|e| (e, StandardNormal.sample(r)))
        .collect();
    Polynomial::from_terms(num_vars, terms).expect("exponents have num_vars entries")
}

pub fn generate(spec: &InstanceSpec) -> Result<Instance> {
    let InstanceSpec { n, m, degree, .. } = *spec;
    if m > n {
        return Err(Error::InvalidArgument(format!("m = {m} exceeds n = {n}")));
    }
    if degree == 0 {
        return Err(Error::InvalidArgument("degree must be positive".into()));
    }
    let mut r = rng(spec.seed);
    let f = random_dense(&mut r, m, degree);
    let columns: Vec<Vec<f64>> = (0..m).map(|_| gaussian_vec(&mut r, n)).collect();
    let mut ell = DenseMatrix::from_columns(n, &columns)?;
    if spec.orthonormal && m > 0 {
        ell = orthonormalize(&ell)?;
    }
    let perturbation = random_dense(&mut r, n, degree);
    let truth = SparseForm::new(f, ell)?;
    let mut h = truth.expand()?;
    if spec.epsilon != 0.0 {
        h = &h + &perturbation.scale(spec.epsilon);
    }
    Ok(Instance {
        h,
        truth,
        perturbation,
        epsilon: spec.epsilon,
        spec: spec.clone(),
    })
}
