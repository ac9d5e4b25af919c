//! Sparse multivariate polynomials over `f64`.
//!
//! A [`Polynomial`] is a map from dense exponent vectors to coefficients. Terms
//! are kept in graded-lexicographic order so that iteration and serialization
//! are deterministic. After every arithmetic operation coefficients below
//! [`DROP_TOL`](crate::DROP_TOL) are removed.

mod moments;

use std::cmp::Ordering;
use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

use crate::{Error, Result, DROP_TOL};

pub use moments::{ball_monomial_moment, expectation_product, expectation_uniform_ball};

/// All exponent vectors in `num_vars` variables with total degree at most
/// `max_degree`.
pub fn monomials_up_to(num_vars: usize, max_degree: u32) -> Vec<Vec<u32>> {
    fn rec(i: usize, left: u32, current: &mut Vec<u32>, out: &mut Vec<Vec<u32>>) {
        if i == current.len() {
            out.push(current.clone());
            return;
        }
        for e in 0..=left {
            current[i] = e;
            rec(i + 1, left - e, current, out);
        }
        current[i] = 0;
    }
    let mut out = Vec::new();
    rec(0, max_degree, &mut vec![0; num_vars], &mut out);
    out
}

/// Dense exponent vector ordered graded-lexicographically.
///
/// Lower total degree sorts first; within a degree, `x₁` precedes `x₂`, so the
/// degree-two monomials in two variables come out as `x₁², x₁x₂, x₂²`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Monomial(Vec<u32>);

impl Monomial {
    pub fn new(exponents: Vec<u32>) -> Self {
        Self(exponents)
    }

    pub fn exponents(&self) -> &[u32] {
        &self.0
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().sum()
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.degree()
            .cmp(&other.degree())
            .then_with(|| other.0.cmp(&self.0))
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Sparse polynomial in `num_vars` real variables.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PolynomialJson", into = "PolynomialJson")]
pub struct Polynomial {
    num_vars: usize,
    terms: BTreeMap<Monomial, f64>,
}

impl Polynomial {
    pub fn zero(num_vars: usize) -> Self {
        Self {
            num_vars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(num_vars: usize, c: f64) -> Self {
        Self::from_map(num_vars, std::iter::once((vec![0; num_vars], c)))
    }

    /// The coordinate polynomial `x_index`.
    pub fn var(num_vars: usize, index: usize) -> Self {
        assert!(index < num_vars, "variable index {index} out of range");
        let mut e = vec![0; num_vars];
        e[index] = 1;
        Self::from_map(num_vars, std::iter::once((e, 1.0)))
    }

    /// Linear form `Σ coeffs[i]·x_i` (no constant term).
    pub fn linear(coeffs: &[f64]) -> Self {
        let n = coeffs.len();
        Self::from_map(
            n,
            coeffs.iter().enumerate().map(|(i, &c)| {
                let mut e = vec![0; n];
                e[i] = 1;
                (e, c)
            }),
        )
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs; repeated
    /// exponents are summed.
    pub fn from_terms<I>(num_vars: usize, terms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let terms: Vec<_> = terms.into_iter().collect();
        if let Some((e, _)) = terms.iter().find(|(e, _)| e.len() != num_vars) {
            return Err(Error::DimensionMismatch {
                expected: num_vars,
                got: e.len(),
            });
        }
        Ok(Self::from_map(num_vars, terms))
    }

    fn from_map<I>(num_vars: usize, terms: I) -> Self
    where
        I: IntoIterator<Item = (Vec<u32>, f64)>,
    {
        let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
        for (e, c) in terms {
            debug_assert_eq!(e.len(), num_vars);
            *acc.entry(e).or_insert(0.0) += c;
        }
        Self::from_accumulator(num_vars, acc)
    }

    fn from_accumulator(num_vars: usize, acc: HashMap<Vec<u32>, f64>) -> Self {
        let terms = acc
            .into_iter()
            // NaN coefficients are kept so they surface downstream
            .filter(|(_, c)| c.abs() >= DROP_TOL || c.is_nan())
            .map(|(e, c)| (Monomial(e), c))
            .collect();
        Self { num_vars, terms }
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    /// Terms in graded-lexicographic order.
    pub fn terms(&self) -> impl Iterator<Item = (&[u32], f64)> + '_ {
        self.terms.iter().map(|(m, &c)| (m.exponents(), c))
    }

    pub fn coefficient(&self, exponents: &[u32]) -> f64 {
        self.terms
            .get(&Monomial(exponents.to_vec()))
            .copied()
            .unwrap_or(0.0)
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(Monomial::degree).max().unwrap_or(0)
    }

    /// Highest power of variable `var` appearing in any term.
    pub fn degree_in(&self, var: usize) -> u32 {
        self.terms.keys().map(|m| m.0[var]).max().unwrap_or(0)
    }

    /// Largest absolute coefficient.
    pub fn max_abs_coefficient(&self) -> f64 {
        self.terms.values().fold(0.0, |a, c| a.max(c.abs()))
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<f64> {
        if x.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: x.len(),
            });
        }
        Ok(self.eval(x))
    }

    /// Unchecked evaluation; panics in debug builds on a length mismatch.
    pub fn eval(&self, x: &[f64]) -> f64 {
        debug_assert_eq!(x.len(), self.num_vars);
        let mut sum = 0.0;
        for (m, &c) in &self.terms {
            let mut t = c;
            for (xi, &k) in x.iter().zip(&m.0) {
                if k > 0 {
                    t *= xi.powi(k as i32);
                }
            }
            sum += t;
        }
        sum
    }

    pub fn scale(&self, s: f64) -> Self {
        Self::from_map(
            self.num_vars,
            self.terms.iter().map(|(m, &c)| (m.0.clone(), c * s)),
        )
    }

    pub fn partial_derivative(&self, var: usize) -> Self {
        assert!(var < self.num_vars, "variable index {var} out of range");
        Self::from_map(
            self.num_vars,
            self.terms.iter().filter(|(m, _)| m.0[var] > 0).map(|(m, &c)| {
                let mut e = m.0.clone();
                let k = e[var];
                e[var] -= 1;
                (e, c * k as f64)
            }),
        )
    }

    pub fn gradient(&self) -> Vec<Self> {
        (0..self.num_vars)
            .map(|i| self.partial_derivative(i))
            .collect()
    }

    pub fn pow(&self, k: u32) -> Self {
        let mut acc = Self::constant(self.num_vars, 1.0);
        for _ in 0..k {
            acc = &acc * self;
        }
        acc
    }

    /// Composition with degree-≤1 forms: returns `q(t) = p(forms₁(t), …)`.
    ///
    /// All forms must share the same variable count, which becomes the
    /// variable count of the result.
    pub fn substitute_linear(&self, forms: &[Polynomial]) -> Result<Self> {
        if let Some((index, form)) = forms.iter().enumerate().find(|(_, f)| f.degree() > 1) {
            return Err(Error::NonLinearForm {
                index,
                degree: form.degree(),
            });
        }
        self.compose(forms)
    }

    /// General composition `p(forms₁(t), …, forms_n(t))`.
    pub fn compose(&self, forms: &[Polynomial]) -> Result<Self> {
        if forms.len() != self.num_vars {
            return Err(Error::DimensionMismatch {
                expected: self.num_vars,
                got: forms.len(),
            });
        }
        let k = match forms.first() {
            Some(f) => f.num_vars,
            None => {
                // Zero input variables: p is a constant.
                let c = self.coefficient(&[]);
                return Ok(Self::constant(0, c));
            }
        };
        if let Some(f) = forms.iter().find(|f| f.num_vars != k) {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: f.num_vars,
            });
        }

        // Products Π forms_i^{α_i} are memoized by exponent: each one is the
        // product for α minus its first nonzero unit times one form.
        let mut cache: HashMap<Vec<u32>, Polynomial> = HashMap::new();
        cache.insert(vec![0; self.num_vars], Self::constant(k, 1.0));
        let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
        for (m, &c) in &self.terms {
            let prod = product_of_powers(&m.0, forms, &mut cache);
            for (e, d) in &prod.terms {
                *acc.entry(e.0.clone()).or_insert(0.0) += c * d;
            }
        }
        Ok(Self::from_accumulator(k, acc))
    }

    /// Re-indexes variables: variable `i` of `self` becomes variable
    /// `mapping[i]` of a polynomial in `num_vars` variables.
    pub fn embed(&self, num_vars: usize, mapping: &[usize]) -> Self {
        assert_eq!(mapping.len(), self.num_vars);
        Self::from_map(
            num_vars,
            self.terms.iter().map(|(m, &c)| {
                let mut e = vec![0; num_vars];
                for (i, &k) in m.0.iter().enumerate() {
                    e[mapping[i]] += k;
                }
                (e, c)
            }),
        )
    }

    /// Keeps only the terms for which `keep` returns true.
    pub fn filter_terms<F>(&self, mut keep: F) -> Self
    where
        F: FnMut(&[u32], f64) -> bool,
    {
        Self {
            num_vars: self.num_vars,
            terms: self
                .terms
                .iter()
                .filter(|(m, &c)| keep(&m.0, c))
                .map(|(m, &c)| (m.clone(), c))
                .collect(),
        }
    }

    /// Maximum coefficientwise absolute difference.
    pub fn max_coef_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.num_vars, other.num_vars);
        let mut d: f64 = 0.0;
        for (m, &c) in &self.terms {
            d = d.max((c - other.terms.get(m).copied().unwrap_or(0.0)).abs());
        }
        for (m, &c) in &other.terms {
            if !self.terms.contains_key(m) {
                d = d.max(c.abs());
            }
        }
        d
    }

    fn combine(&self, other: &Self, sign: f64) -> Self {
        assert_eq!(
            self.num_vars, other.num_vars,
            "polynomials have different variable counts"
        );
        let mut acc: HashMap<Vec<u32>, f64> = HashMap::with_capacity(self.terms.len() + other.terms.len());
        for (m, &c) in &self.terms {
            acc.insert(m.0.clone(), c);
        }
        for (m, &c) in &other.terms {
            *acc.entry(m.0.clone()).or_insert(0.0) += sign * c;
        }
        Self::from_accumulator(self.num_vars, acc)
    }

    fn product(&self, other: &Self) -> Self {
        assert_eq!(
            self.num_vars, other.num_vars,
            "polynomials have different variable counts"
        );
        let mut acc: HashMap<Vec<u32>, f64> = HashMap::new();
        let mut e = vec![0u32; self.num_vars];
        for (a, &ca) in &self.terms {
            for (b, &cb) in &other.terms {
                for ((ei, &ai), &bi) in e.iter_mut().zip(&a.0).zip(&b.0) {
                    *ei = ai + bi;
                }
                *acc.entry(e.clone()).or_insert(0.0) += ca * cb;
            }
        }
        Self::from_accumulator(self.num_vars, acc)
    }
}

fn product_of_powers<'a>(
    exps: &[u32],
    forms: &[Polynomial],
    cache: &'a mut HashMap<Vec<u32>, Polynomial>,
) -> &'a Polynomial {
    if !cache.contains_key(exps) {
        let i = exps.iter().position(|&e| e > 0).expect("zero exponent is cached");
        let mut prev = exps.to_vec();
        prev[i] -= 1;
        let lower = product_of_powers(&prev, forms, cache).clone();
        let next = lower.product(&forms[i]);
        cache.insert(exps.to_vec(), next);
    }
    &cache[exps]
}

impl Add for &Polynomial {
    type Output = Polynomial;
    fn add(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, 1.0)
    }
}

impl Sub for &Polynomial {
    type Output = Polynomial;
    fn sub(self, rhs: &Polynomial) -> Polynomial {
        self.combine(rhs, -1.0)
    }
}

impl Mul for &Polynomial {
    type Output = Polynomial;
    fn mul(self, rhs: &Polynomial) -> Polynomial {
        self.product(rhs)
    }
}

impl Neg for &Polynomial {
    type Output = Polynomial;
    fn neg(self) -> Polynomial {
        self.scale(-1.0)
    }
}

impl fmt::Display for Polynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        for (k, (m, c)) in self.terms.iter().enumerate() {
            if k > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            for (i, &e) in m.0.iter().enumerate() {
                match e {
                    0 => {}
                    1 => write!(f, "*x{}", i + 1)?,
                    _ => write!(f, "*x{}^{e}", i + 1)?,
                }
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct TermJson {
    exp: Vec<u32>,
    coef: f64,
}

#[derive(Serialize, Deserialize)]
struct PolynomialJson {
    num_vars: usize,
    terms: Vec<TermJson>,
}

impl From<Polynomial> for PolynomialJson {
    fn from(p: Polynomial) -> Self {
        Self {
            num_vars: p.num_vars,
            terms: p
                .terms
                .into_iter()
                .map(|(m, coef)| TermJson { exp: m.0, coef })
                .collect(),
        }
    }
}

impl TryFrom<PolynomialJson> for Polynomial {
    type Error = Error;
    fn try_from(j: PolynomialJson) -> Result<Self> {
        if let Some(t) = j.terms.iter().find(|t| !t.coef.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite coefficient {}",
                t.coef
            )));
        }
        Polynomial::from_terms(j.num_vars, j.terms.into_iter().map(|t| (t.exp, t.coef)))
    }
}
