//! Dense two-phase simplex for small problems in standard form
//! `min c.x  s.t.  A x = b, x >= 0`, with Bland's rule throughout.

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Constraint rows of `A`.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    /// Objective; empty means a pure feasibility problem.
    pub c: Vec<f64>,
}

impl LinearProgram {
    pub fn feasibility(a: Vec<Vec<f64>>, b: Vec<f64>) -> Self {
        Self { a, b, c: Vec::new() }
    }

    fn vars(&self) -> usize {
        self.a.first().map_or(self.c.len(), Vec::len)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LpOptions {
    /// Largest phase-one residual (sum of artificials) still accepted as feasible.
    pub feasibility_tol: f64,
    /// Pivot elements at or below this magnitude are never used.
    pub pivot_tol: f64,
    pub max_pivots: usize,
}

impl Default for LpOptions {
    fn default() -> Self {
        Self { feasibility_tol: 1e-9, pivot_tol: 1e-12, max_pivots: 50_000 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal {
        x: Vec<f64>,
        objective: f64,
    },
    /// Certified by a positive phase-one optimum.
    Infeasible {
        residual: f64,
    },
    Unbounded,
}

impl LpOutcome {
    pub fn point(&self) -> Option<&[f64]> {
        match self {
            LpOutcome::Optimal { x, .. } => Some(x),
            _ => None,
        }
    }
}

const REDUCED_COST_TOL: f64 = 1e-11;

struct Tableau {
    rows: Vec<Vec<f64>>,
    basis: Vec<usize>,
    width: usize,
}

enum Status {
    Optimal,
    Unbounded,
}

impl Tableau {
    fn rhs(&self, r: usize) -> f64 {
        self.rows[r][self.width]
    }

    fn pivot(&mut self, cost: &mut [f64], r: usize, col: usize) {
        let p = self.rows[r][col];
        for v in self.rows[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.rows[r].clone();
        for (i, row) in self.rows.iter_mut().enumerate() {
            if i == r {
                continue;
            }
            let f = row[col];
            if f != 0.0 {
                for (v, pv) in row.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                row[col] = 0.0;
            }
        }
        let f = cost[col];
        if f != 0.0 {
            for (v, pv) in cost.iter_mut().zip(&pivot_row) {
                *v -= f * pv;
            }
            cost[col] = 0.0;
        }
        self.basis[r] = col;
    }

    fn run(&mut self, cost: &mut [f64], allowed: &dyn Fn(usize) -> bool, opts: &LpOptions) -> Result<Status> {
        for _ in 0..opts.max_pivots {
            // Bland: lowest-index improving column
            let Some(col) = (0..self.width).find(|&j| allowed(j) && cost[j] < -REDUCED_COST_TOL) else {
                return Ok(Status::Optimal);
            };
            let mut best: Option<(usize, f64)> = None;
            let mut tiny = false;
            for r in 0..self.rows.len() {
                let a = self.rows[r][col];
                if a > opts.pivot_tol {
                    let ratio = self.rhs(r).max(0.0) / a;
                    best = match best {
                        None => Some((r, ratio)),
                        Some((br, bratio)) => {
                            if ratio < bratio || (ratio == bratio && self.basis[r] < self.basis[br]) {
                                Some((r, ratio))
                            } else {
                                Some((br, bratio))
                            }
                        }
                    };
                } else if a > 0.0 {
                    tiny = true;
                }
            }
            match best {
                Some((r, _)) => self.pivot(cost, r, col),
                None if tiny => {
                    return Err(Error::NumericalInstability(format!(
                        "only pivots below {:e} available in column {col}",
                        opts.pivot_tol
                    )))
                }
                None => return Ok(Status::Unbounded),
            }
        }
        Err(Error::NumericalInstability(format!("no convergence within {} pivots", opts.max_pivots)))
    }
}

/// Solve `min c.x s.t. A x = b, x >= 0`.
pub fn solve_lp(lp: &LinearProgram, opts: &LpOptions) -> Result<LpOutcome> {
    let m = lp.a.len();
    let n = lp.vars();
    if lp.b.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: lp.b.len() });
    }
    if let Some(row) = lp.a.iter().find(|r| r.len() != n) {
        return Err(Error::DimensionMismatch { expected: n, found: row.len() });
    }
    if !lp.c.is_empty() && lp.c.len() != n {
        return Err(Error::DimensionMismatch { expected: n, found: lp.c.len() });
    }

    // columns: originals 0..n, artificials n..n+m, rhs at n+m
    let width = n + m;
    let mut rows = Vec::with_capacity(m);
    for (r, (a, &b)) in lp.a.iter().zip(&lp.b).enumerate() {
        let sign = if b < 0.0 { -1.0 } else { 1.0 };
        let mut row = vec![0.0; width + 1];
        for (j, v) in a.iter().enumerate() {
            row[j] = sign * v;
        }
        row[n + r] = 1.0;
        row[width] = sign * b;
        rows.push(row);
    }
    let mut t = Tableau { rows, basis: (n..n + m).collect(), width };

    // phase one: minimise the sum of artificials
    let mut cost = vec![0.0; width + 1];
    for row in &t.rows {
        for j in 0..n {
            cost[j] -= row[j];
        }
        cost[width] -= row[width];
    }
    t.run(&mut cost, &|_| true, opts)?;
    let residual = -cost[width];
    if residual > opts.feasibility_tol {
        return Ok(LpOutcome::Infeasible { residual });
    }

    // drive remaining artificials out of the basis; rows that cannot pivot are redundant
    let mut redundant = vec![false; m];
    for r in 0..m {
        if t.basis[r] < n {
            continue;
        }
        let col = (0..n)
            .filter(|&j| t.rows[r][j].abs() > opts.pivot_tol)
            .max_by(|&a, &b| t.rows[r][a].abs().total_cmp(&t.rows[r][b].abs()).then(b.cmp(&a)));
        match col {
            Some(col) => {
                let mut dummy = vec![0.0; width + 1];
                t.pivot(&mut dummy, r, col);
            }
            None => redundant[r] = true,
        }
    }

    // phase two
    let mut cost = vec![0.0; width + 1];
    if !lp.c.is_empty() {
        cost[..n].copy_from_slice(&lp.c);
        for r in 0..m {
            let cb = if t.basis[r] < n { lp.c[t.basis[r]] } else { 0.0 };
            if cb != 0.0 {
                for j in 0..=width {
                    cost[j] -= cb * t.rows[r][j];
                }
            }
        }
        for r in 0..m {
            if t.basis[r] < n {
                cost[t.basis[r]] = 0.0;
            }
        }
    }
    if let Status::Unbounded = t.run(&mut cost, &|j| j < n, opts)? {
        return Ok(LpOutcome::Unbounded);
    }

    let mut x = vec![0.0; n];
    for r in 0..m {
        if !redundant[r] && t.basis[r] < n {
            x[t.basis[r]] = t.rhs(r).max(0.0);
        }
    }
    let objective = if lp.c.is_empty() { 0.0 } else { lp.c.iter().zip(&x).map(|(c, v)| c * v).sum() };
    Ok(LpOutcome::Optimal { x, objective })
}

/// Find `x >= 0` with `A x = b` (within `tol` in L1 residual), or `None`.
pub fn find_feasible(a: Vec<Vec<f64>>, b: Vec<f64>, tol: f64) -> Result<Option<Vec<f64>>> {
    let opts = LpOptions { feasibility_tol: tol, ..LpOptions::default() };
    Ok(match solve_lp(&LinearProgram::feasibility(a, b), &opts)? {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    })
}
