//! Dense two-phase simplex for small problems in standard form
//!
//! ```text
//! minimize c·x  subject to  A x = b,  x ≥ 0
//! ```
//!
//! Bland's rule is used for both the entering and the leaving variable, so
//! the method terminates on degenerate problems. Redundant equality rows are
//! detected at the end of phase 1 and removed.

use crate::error::{Error, Result};

/// Default tolerance for reduced costs, pivot elements and feasibility.
pub const DEFAULT_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    /// Equality constraint rows; every row has `c.len()` entries.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub status: LpStatus,
    /// Primal point; meaningful only when `status` is `Optimal`.
    pub x: Vec<f64>,
    pub objective: f64,
    pub pivots: usize,
}

struct Tableau {
    /// rows × (cols + 1); last column is the right-hand side.
    t: Vec<Vec<f64>>,
    basis: Vec<usize>,
    cols: usize,
    tol: f64,
    pivots: usize,
    max_pivots: usize,
}

impl Tableau {
    fn rhs(&self, row: usize) -> f64 {
        self.t[row][self.cols]
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.t[row][col];
        for v in self.t[row].iter_mut() {
            *v /= p;
        }
        let pivot_row = self.t[row].clone();
        for (i, r) in self.t.iter_mut().enumerate() {
            if i == row {
                continue;
            }
            let f = r[col];
            if f != 0.0 {
                for (v, pv) in r.iter_mut().zip(&pivot_row) {
                    *v -= f * pv;
                }
                r[col] = 0.0;
            }
        }
        self.basis[row] = col;
        self.pivots += 1;
    }

    fn reduced_costs(&self, cost: &[f64]) -> Vec<f64> {
        let mut d = cost.to_vec();
        for (row, &bv) in self.basis.iter().enumerate() {
            let cb = cost[bv];
            if cb != 0.0 {
                for (dj, tij) in d.iter_mut().zip(&self.t[row]) {
                    *dj -= cb * tij;
                }
            }
        }
        d
    }

    /// Runs simplex iterations for `cost` over columns `0..allowed`.
    /// Returns false if the problem is unbounded.
    fn optimize(&mut self, cost: &[f64], allowed: usize) -> Result<bool> {
        loop {
            let d = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| d[j] < -self.tol) else {
                return Ok(true);
            };
            let mut leave: Option<(usize, f64)> = None;
            for (i, row) in self.t.iter().enumerate() {
                let a = row[enter];
                if a > self.tol {
                    let ratio = self.rhs(i) / a;
                    leave = match leave {
                        None => Some((i, ratio)),
                        Some((li, lr)) => {
                            if ratio < lr - self.tol
                                || ((ratio - lr).abs() <= self.tol && self.basis[i] < self.basis[li])
                            {
                                Some((i, ratio))
                            } else {
                                Some((li, lr))
                            }
                        }
                    };
                }
            }
            let Some((row, _)) = leave else {
                return Ok(false);
            };
            if self.pivots >= self.max_pivots {
                return Err(Error::Convergence(self.max_pivots));
            }
            self.pivot(row, enter);
        }
    }
}

impl LinearProgram {
    pub fn new(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> Result<Self> {
        if a.len() != b.len() || a.iter().any(|row| row.len() != c.len()) {
            return Err(Error::Domain("constraint matrix shape does not match b and c".into()));
        }
        Ok(LinearProgram { a, b, c })
    }

    pub fn solve(&self) -> Result<LpSolution> {
        self.solve_with_tolerance(DEFAULT_TOLERANCE)
    }

    pub fn solve_with_tolerance(&self, tol: f64) -> Result<LpSolution> {
        let n = self.c.len();
        let m = self.b.len();
        let cols = n + m;

        let mut t = Vec::with_capacity(m);
        for (i, (row, &bi)) in self.a.iter().zip(&self.b).enumerate() {
            let sign = if bi < 0.0 { -1.0 } else { 1.0 };
            let mut r = vec![0.0; cols + 1];
            for (dst, src) in r.iter_mut().zip(row) {
                *dst = sign * src;
            }
            r[n + i] = 1.0;
            r[cols] = sign * bi;
            t.push(r);
        }
        let mut tab = Tableau {
            t,
            basis: (n..cols).collect(),
            cols,
            tol,
            pivots: 0,
            max_pivots: 50 * (cols + 1).max(100),
        };

        // phase 1: minimize the sum of artificials
        let mut phase1 = vec![0.0; cols];
        phase1[n..].iter_mut().for_each(|v| *v = 1.0);
        tab.optimize(&phase1, cols)?;
        let infeasibility: f64 = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bv)| bv >= n)
            .map(|(i, _)| tab.rhs(i))
            .sum();
        let scale = self.b.iter().fold(1.0_f64, |acc, v| acc.max(v.abs()));
        if infeasibility > tol * scale {
            return Ok(LpSolution {
                status: LpStatus::Infeasible,
                x: vec![0.0; n],
                objective: f64::NAN,
                pivots: tab.pivots,
            });
        }

        // drive remaining (zero-level) artificials out, dropping redundant rows
        let mut row = 0;
        while row < tab.t.len() {
            if tab.basis[row] >= n {
                match (0..n).find(|&j| tab.t[row][j].abs() > tol) {
                    Some(j) => tab.pivot(row, j),
                    None => {
                        tab.t.remove(row);
                        tab.basis.remove(row);
                        continue;
                    }
                }
            }
            row += 1;
        }

        let mut cost = self.c.clone();
        cost.resize(cols, 0.0);
        if !tab.optimize(&cost, n)? {
            return Ok(LpSolution {
                status: LpStatus::Unbounded,
                x: vec![0.0; n],
                objective: f64::NEG_INFINITY,
                pivots: tab.pivots,
            });
        }

        let mut x = vec![0.0; n];
        for (i, &bv) in tab.basis.iter().enumerate() {
            if bv < n {
                x[bv] = tab.rhs(i);
            }
        }
        let objective = x.iter().zip(&self.c).map(|(xi, ci)| xi * ci).sum();
        Ok(LpSolution {
            status: LpStatus::Optimal,
            x,
            objective,
            pivots: tab.pivots,
        })
    }

    /// Largest violation of `A x = b` and `x ≥ 0` at the point `x`.
    pub fn max_residual(&self, x: &[f64]) -> f64 {
        let eq = self
            .a
            .iter()
            .zip(&self.b)
            .map(|(row, bi)| (row.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() - bi).abs())
            .fold(0.0, f64::max);
        let neg = x.iter().map(|v| (-v).max(0.0)).fold(0.0, f64::max);
        eq.max(neg)
    }
}
