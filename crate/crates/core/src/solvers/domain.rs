//! Compact convex domains described by a linear minimization oracle.

use serde::{Deserialize, Serialize};

use crate::linalg::{dot, lp_solve, DenseMatrix, LpProblem, LpStatus};
use crate::{Error, Result};

/// A nonempty compact convex set accessed through `argmin_{x ∈ D} cᵀx`.
pub trait LinearOracle: Sync {
    fn dim(&self) -> usize;
    /// A vertex minimizing `cᵀx`.
    fn argmin_linear(&self, c: &[f64]) -> Result<Vec<f64>>;
    /// Distance-like infeasibility of `x`; zero inside.
    fn violation(&self, x: &[f64]) -> f64;
}

/// `{x : Ax ≤ b, Ex = e, lower ≤ x ≤ upper}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Polyhedron {
    pub dim: usize,
    #[serde(default)]
    pub ineq_rows: Vec<Vec<f64>>,
    #[serde(default)]
    pub ineq_rhs: Vec<f64>,
    #[serde(default)]
    pub eq_rows: Vec<Vec<f64>>,
    #[serde(default)]
    pub eq_rhs: Vec<f64>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

impl Polyhedron {
    /// All of `ℝ^dim`.
    pub fn free(dim: usize) -> Self {
        Self {
            dim,
            ineq_rows: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            lower: vec![None; dim],
            upper: vec![None; dim],
        }
    }

    /// `[-r, r]^dim`.
    pub fn cube(dim: usize, r: f64) -> Self {
        Self {
            lower: vec![Some(-r); dim],
            upper: vec![Some(r); dim],
            ..Self::free(dim)
        }
    }

    /// `{x ≥ 0 : Σx ≤ 1}`.
    pub fn standard_simplex(dim: usize) -> Self {
        let mut p = Self {
            lower: vec![Some(0.0); dim],
            ..Self::free(dim)
        };
        p.add_leq(vec![1.0; dim], 1.0);
        p
    }

    pub fn add_leq(&mut self, row: Vec<f64>, rhs: f64) {
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
    }

    pub fn add_eq(&mut self, row: Vec<f64>, rhs: f64) {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower.into_iter().map(Some).collect();
        self.upper = upper.into_iter().map(Some).collect();
        self
    }

    fn validate(&self) -> Result<()> {
        let rows_ok = self.ineq_rows.iter().chain(&self.eq_rows).all(|r| r.len() == self.dim);
        if !rows_ok
            || self.ineq_rows.len() != self.ineq_rhs.len()
            || self.eq_rows.len() != self.eq_rhs.len()
            || self.lower.len() != self.dim
            || self.upper.len() != self.dim
        {
            return Err(Error::InvalidArgument("inconsistent polyhedron dimensions".into()));
        }
        Ok(())
    }

    pub fn lp(&self, objective: Vec<f64>) -> LpProblem {
        LpProblem {
            objective,
            ineq_rows: self.ineq_rows.clone(),
            ineq_rhs: self.ineq_rhs.clone(),
            eq_rows: self.eq_rows.clone(),
            eq_rhs: self.eq_rhs.clone(),
            lower: self.lower.clone(),
            upper: self.upper.clone(),
        }
    }

    /// Some point of the polyhedron, or `EmptyPolytope`.
    pub fn feasible_point(&self) -> Result<Vec<f64>> {
        self.validate()?;
        let r = lp_solve(&self.lp(vec![0.0; self.dim]))?;
        match r.status {
            LpStatus::Optimal => Ok(r.x),
            _ => Err(Error::EmptyPolytope),
        }
    }

    /// Coordinate ranges; `UnboundedPolytope(i)` if coordinate `i` is unbounded.
    pub fn bounding_box(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        self.feasible_point()?;
        let mut lo = Vec::with_capacity(self.dim);
        let mut hi = Vec::with_capacity(self.dim);
        for i in 0..self.dim {
            let mut c = vec![0.0; self.dim];
            c[i] = 1.0;
            let r = lp_solve(&self.lp(c.clone()))?;
            if r.status != LpStatus::Optimal {
                return Err(Error::UnboundedPolytope(i));
            }
            lo.push(r.value);
            c[i] = -1.0;
            let r = lp_solve(&self.lp(c))?;
            if r.status != LpStatus::Optimal {
                return Err(Error::UnboundedPolytope(i));
            }
            hi.push(-r.value);
        }
        Ok((lo, hi))
    }
}

impl LinearOracle for Polyhedron {
    fn dim(&self) -> usize {
        self.dim
    }

    fn argmin_linear(&self, c: &[f64]) -> Result<Vec<f64>> {
        self.validate()?;
        let r = lp_solve(&self.lp(c.to_vec()))?;
        match r.status {
            LpStatus::Optimal => Ok(r.x),
            LpStatus::Infeasible => Err(Error::EmptyPolytope),
            LpStatus::Unbounded => Err(Error::LpUnbounded),
        }
    }

    fn violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = self.lp(Vec::new()).max_violation(x);
        for (i, &v) in x.iter().enumerate() {
            if let Some(l) = self.lower[i] {
                worst = worst.max(l - v);
            }
            if let Some(u) = self.upper[i] {
                worst = worst.max(v - u);
            }
        }
        worst.max(0.0)
    }
}

/// Convex hull of finitely many points.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VertexHull {
    pub dim: usize,
    pub points: Vec<Vec<f64>>,
}

impl VertexHull {
    pub fn new(dim: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::EmptyPolytope);
        }
        if let Some(p) = points.iter().find(|p| p.len() != dim) {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: p.len(),
            });
        }
        Ok(Self { dim, points })
    }
}

impl LinearOracle for VertexHull {
    fn dim(&self) -> usize {
        self.dim
    }

    fn argmin_linear(&self, c: &[f64]) -> Result<Vec<f64>> {
        let best = self
            .points
            .iter()
            .min_by(|a, b| dot(c, a).total_cmp(&dot(c, b)))
            .ok_or(Error::EmptyPolytope)?;
        Ok(best.clone())
    }

    /// Smallest `t` with `x` within sup-distance `t` of the hull.
    fn violation(&self, x: &[f64]) -> f64 {
        let k = self.points.len();
        let mut obj = vec![0.0; k + 1];
        obj[k] = 1.0;
        let mut lp = LpProblem::new(obj);
        let mut ones = vec![1.0; k + 1];
        ones[k] = 0.0;
        lp = lp.eq(ones, 1.0);
        for i in 0..self.dim {
            let mut row: Vec<f64> = self.points.iter().map(|p| p[i]).collect();
            row.push(-1.0);
            lp = lp.leq(row.clone(), x[i]);
            let mut neg: Vec<f64> = row[..k].iter().map(|v| -v).collect();
            neg.push(-1.0);
            lp = lp.leq(neg, -x[i]);
        }
        hull_lp_value(&lp)
    }
}

/// Linear image `{ellᵀx : x ∈ [-1, 1]^n}` of the cube.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Zonotope {
    pub ell: DenseMatrix,
}

impl LinearOracle for Zonotope {
    fn dim(&self) -> usize {
        self.ell.ncols()
    }

    fn argmin_linear(&self, c: &[f64]) -> Result<Vec<f64>> {
        let weights = self.ell.matvec(c)?;
        let x: Vec<f64> = weights.iter().map(|&w| if w > 0.0 { -1.0 } else { 1.0 }).collect();
        self.ell.tr_matvec(&x)
    }

    fn violation(&self, y: &[f64]) -> f64 {
        let (n, m) = self.ell.shape();
        let mut obj = vec![0.0; n + 1];
        obj[n] = 1.0;
        let mut lp = LpProblem::new(obj).free();
        for i in 0..n {
            lp = lp.bounds(i, Some(-1.0), Some(1.0));
        }
        lp = lp.bounds(n, Some(0.0), None);
        for (j, &yj) in y.iter().enumerate().take(m) {
            let mut row = self.ell.column(j);
            row.push(-1.0);
            lp = lp.leq(row.clone(), yj);
            let mut neg: Vec<f64> = row[..n].iter().map(|v| -v).collect();
            neg.push(-1.0);
            lp = lp.leq(neg, -yj);
        }
        hull_lp_value(&lp)
    }
}

fn hull_lp_value(lp: &LpProblem) -> f64 {
    match lp_solve(lp) {
        Ok(r) if r.status == LpStatus::Optimal => r.value.max(0.0),
        _ => f64::INFINITY,
    }
}
