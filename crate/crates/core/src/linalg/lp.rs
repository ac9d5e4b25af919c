//! Dense two-phase primal simplex with Bland's anti-cycling rule.
//!
//! Problems are tiny (tens of variables), so a full tableau is used and
//! rebuilt per call.

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const PIVOT_EPS: f64 = 1e-11;
const COST_EPS: f64 = 1e-10;

/// `min c·x` subject to `A_ub x ≤ b_ub`, `A_eq x = b_eq`, `lower ≤ x ≤ upper`.
///
/// Variables default to `x ≥ 0`; `None` bounds are infinite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpProblem {
    pub objective: Vec<f64>,
    pub ineq_rows: Vec<Vec<f64>>,
    pub ineq_rhs: Vec<f64>,
    pub eq_rows: Vec<Vec<f64>>,
    pub eq_rhs: Vec<f64>,
    pub lower: Vec<Option<f64>>,
    pub upper: Vec<Option<f64>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LpStatus {
    Optimal,
    Unbounded,
    Infeasible,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LpResult {
    pub status: LpStatus,
    /// Optimal value; `-inf` when unbounded, `+inf` when infeasible.
    pub value: f64,
    /// Optimal basic solution; empty unless `status` is optimal.
    pub x: Vec<f64>,
}

impl LpProblem {
    pub fn new(objective: Vec<f64>) -> Self {
        let n = objective.len();
        Self {
            objective,
            ineq_rows: Vec::new(),
            ineq_rhs: Vec::new(),
            eq_rows: Vec::new(),
            eq_rhs: Vec::new(),
            lower: vec![Some(0.0); n],
            upper: vec![None; n],
        }
    }

    pub fn num_vars(&self) -> usize {
        self.objective.len()
    }

    /// Makes every variable unbounded in both directions.
    pub fn free(mut self) -> Self {
        self.lower = vec![None; self.num_vars()];
        self.upper = vec![None; self.num_vars()];
        self
    }

    pub fn bounds(mut self, var: usize, lower: Option<f64>, upper: Option<f64>) -> Self {
        self.lower[var] = lower;
        self.upper[var] = upper;
        self
    }

    pub fn leq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.ineq_rows.push(row);
        self.ineq_rhs.push(rhs);
        self
    }

    pub fn geq(self, row: Vec<f64>, rhs: f64) -> Self {
        self.leq(row.into_iter().map(|v| -v).collect(), -rhs)
    }

    pub fn eq(mut self, row: Vec<f64>, rhs: f64) -> Self {
        self.eq_rows.push(row);
        self.eq_rhs.push(rhs);
        self
    }

    fn validate(&self) -> Result<()> {
        let n = self.num_vars();
        let rows_ok = self
            .ineq_rows
            .iter()
            .chain(&self.eq_rows)
            .all(|r| r.len() == n);
        if !rows_ok
            || self.ineq_rows.len() != self.ineq_rhs.len()
            || self.eq_rows.len() != self.eq_rhs.len()
            || self.lower.len() != n
            || self.upper.len() != n
        {
            return Err(Error::InvalidArgument("inconsistent LP dimensions".into()));
        }
        let finite = self
            .objective
            .iter()
            .chain(self.ineq_rows.iter().flatten())
            .chain(self.eq_rows.iter().flatten())
            .chain(&self.ineq_rhs)
            .chain(&self.eq_rhs)
            .chain(self.lower.iter().flatten())
            .chain(self.upper.iter().flatten())
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::InvalidArgument("non-finite LP data".into()));
        }
        Ok(())
    }

    /// Largest violation of the constraints at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let mut worst: f64 = 0.0;
        for (row, &b) in self.ineq_rows.iter().zip(&self.ineq_rhs) {
            worst = worst.max(super::dot(row, x) - b);
        }
        for (row, &b) in self.eq_rows.iter().zip(&self.eq_rhs) {
            worst = worst.max((super::dot(row, x) - b).abs());
        }
        for (j, &xj) in x.iter().enumerate() {
            if let Some(l) = self.lower[j] {
                worst = worst.max(l - xj);
            }
            if let Some(u) = self.upper[j] {
                worst = worst.max(xj - u);
            }
        }
        worst
    }
}

/// Original variable `j` equals `offset + Σ coef·z_k` over standard-form columns.
struct VarMap {
    offset: f64,
    parts: Vec<(usize, f64)>,
}

struct Tableau {
    /// `rows × (cols + 1)`, last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.t[r][self.cols]
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let p = self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[c];
            if f != 0.0 {
                for (v, &pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[c] = 0.0;
            }
        }
        self.basis[r] = c;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for (dj, &a) in d.iter_mut().zip(&self.t[r]) {
                    *dj -= cb * a;
                }
            }
        }
        d
    }

    /// Runs simplex iterations for `cost` over the columns in `allowed`.
    /// Returns `Ok(false)` when unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize, pivots: &mut usize, cap: usize) -> Result<bool> {
        loop {
            let d = self.reduced_costs(cost);
            // Bland: lowest-index improving column
            let Some(enter) = (0..allowed).find(|&j| d[j] < -COST_EPS) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for r in 0..self.t.len() {
                let a = self.t[r][enter];
                if a > PIVOT_EPS {
                    let ratio = self.rhs(r) / a;
                    leave = match leave {
                        None => Some((r, ratio)),
                        Some((lr, lratio)) => {
                            if ratio < lratio - 1e-12
                                || (ratio <= lratio + 1e-12 && self.basis[r] < self.basis[lr])
                            {
                                Some((r, ratio))
                            } else {
                                Some((lr, lratio))
                            }
                        }
                    };
                }
            }
            let Some((r, _)) = leave else {
                return Ok(false);
            };
            self.pivot(r, enter);
            *pivots += 1;
            if *pivots > cap {
                return Err(Error::LpStalled(*pivots));
            }
        }
    }
}

/// Solves a linear program with the two-phase simplex method.
pub fn lp_solve(prob: &LpProblem) -> Result<LpResult> {
    prob.validate()?;
    let n = prob.num_vars();

    // variable substitution into z ≥ 0
    let mut maps = Vec::with_capacity(n);
    let mut nz = 0;
    let mut bound_rows: Vec<(usize, f64)> = Vec::new();
    for j in 0..n {
        match (prob.lower[j], prob.upper[j]) {
            (Some(l), u) => {
                maps.push(VarMap {
                    offset: l,
                    parts: vec![(nz, 1.0)],
                });
                if let Some(u) = u {
                    if u < l {
                        return Ok(infeasible());
                    }
                    bound_rows.push((nz, u - l));
                }
                nz += 1;
            }
            (None, Some(u)) => {
                maps.push(VarMap {
                    offset: u,
                    parts: vec![(nz, -1.0)],
                });
                nz += 1;
            }
            (None, None) => {
                maps.push(VarMap {
                    offset: 0.0,
                    parts: vec![(nz, 1.0), (nz + 1, -1.0)],
                });
                nz += 2;
            }
        }
    }

    let to_z = |row: &[f64], rhs: f64| -> (Vec<f64>, f64) {
        let mut z = vec![0.0; nz];
        let mut b = rhs;
        for (j, &a) in row.iter().enumerate() {
            b -= a * maps[j].offset;
            for &(k, c) in &maps[j].parts {
                z[k] += a * c;
            }
        }
        (z, b)
    };

    let mut ineq: Vec<(Vec<f64>, f64)> = prob
        .ineq_rows
        .iter()
        .zip(&prob.ineq_rhs)
        .map(|(r, &b)| to_z(r, b))
        .collect();
    for &(k, ub) in &bound_rows {
        let mut z = vec![0.0; nz];
        z[k] = 1.0;
        ineq.push((z, ub));
    }
    let eqs: Vec<(Vec<f64>, f64)> = prob
        .eq_rows
        .iter()
        .zip(&prob.eq_rhs)
        .map(|(r, &b)| to_z(r, b))
        .collect();

    let n_ineq = ineq.len();
    let n_rows = n_ineq + eqs.len();
    let slack0 = nz;
    let art0 = nz + n_ineq;

    // every row gets an artificial column; unused ones stay nonbasic at zero
    let cols = art0 + n_rows;
    let mut t = vec![vec![0.0; cols + 1]; n_rows];
    let mut basis = vec![0; n_rows];
    let mut has_artificial = vec![false; n_rows];
    for (r, (row, b)) in ineq.iter().chain(&eqs).enumerate() {
        let sign = if *b < 0.0 { -1.0 } else { 1.0 };
        for (k, &a) in row.iter().enumerate() {
            t[r][k] = sign * a;
        }
        t[r][cols] = sign * b;
        if r < n_ineq {
            t[r][slack0 + r] = sign;
        }
        if r < n_ineq && sign > 0.0 {
            basis[r] = slack0 + r;
        } else {
            t[r][art0 + r] = 1.0;
            basis[r] = art0 + r;
            has_artificial[r] = true;
        }
    }
    let mut tab = Tableau { t, basis, cols };
    let cap = 50 * (cols + n_rows) + 1000;
    let mut pivots = 0;

    // phase 1
    if has_artificial.iter().any(|&a| a) {
        let mut cost1 = vec![0.0; cols];
        for r in 0..n_rows {
            if has_artificial[r] {
                cost1[art0 + r] = 1.0;
            }
        }
        tab.optimize(&cost1, cols, &mut pivots, cap)?;
        let infeas: f64 = (0..n_rows)
            .filter(|&r| tab.basis[r] >= art0)
            .map(|r| tab.rhs(r))
            .sum();
        let scale = 1.0 + ineq.iter().chain(&eqs).fold(0.0f64, |a, (_, b)| a.max(b.abs()));
        if infeas > 1e-8 * scale {
            return Ok(infeasible());
        }
        // drive remaining artificials out of the basis
        let mut r = 0;
        while r < tab.t.len() {
            if tab.basis[r] >= art0 {
                if let Some(c) = (0..art0).find(|&c| tab.t[r][c].abs() > 1e-9) {
                    tab.pivot(r, c);
                    r += 1;
                } else {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                }
            } else {
                r += 1;
            }
        }
    }

    // phase 2 over structural and slack columns only
    let mut cost2 = vec![0.0; cols];
    for (j, m) in maps.iter().enumerate() {
        for &(k, c) in &m.parts {
            cost2[k] += prob.objective[j] * c;
        }
    }
    if !tab.optimize(&cost2, art0, &mut pivots, cap)? {
        return Ok(LpResult {
            status: LpStatus::Unbounded,
            value: f64::NEG_INFINITY,
            x: Vec::new(),
        });
    }

    let mut z = vec![0.0; cols];
    for (r, &b) in tab.basis.iter().enumerate() {
        z[b] = tab.rhs(r).max(0.0);
    }
    let x: Vec<f64> = maps
        .iter()
        .map(|m| m.offset + m.parts.iter().map(|&(k, c)| c * z[k]).sum::<f64>())
        .collect();
    let value = super::dot(&prob.objective, &x);
    Ok(LpResult {
        status: LpStatus::Optimal,
        value,
        x,
    })
}

fn infeasible() -> LpResult {
    LpResult {
        status: LpStatus::Infeasible,
        value: f64::INFINITY,
        x: Vec::new(),
    }
}
