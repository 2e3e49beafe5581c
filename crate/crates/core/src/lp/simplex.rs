//! Two-phase revised simplex on `min c·x, A x = b, x ≥ 0, b ≥ 0`.
//!
//! The basis inverse is kept dense (rows are few, columns may be many) and
//! updated by elementary row operations, with a periodic refactorization.
//! Pricing is Dantzig's rule; after a run of degenerate pivots the solver
//! switches to Bland's rule until the objective moves again.

use crate::error::{Error, Result};
use crate::tolerance::{OPT_TOL, PIVOT_TOL};

const REFACTOR_EVERY: usize = 64;
const DEGENERATE_STREAK_FOR_BLAND: usize = 32;

pub(crate) struct StandardForm {
    pub nrows: usize,
    /// Sparse columns `(row, coef)`.
    pub cols: Vec<Vec<(usize, f64)>>,
    pub rhs: Vec<f64>,
    /// Columns `>= first_artificial` are phase-one artificials.
    pub first_artificial: usize,
    /// Initial basis: one column per row, each a unit column.
    pub initial_basis: Vec<usize>,
}

pub(crate) enum Status {
    Optimal,
    Unbounded,
}

pub(crate) struct Tableau<'a> {
    sf: &'a StandardForm,
    pub basis: Vec<usize>,
    is_basic: Vec<bool>,
    /// Row-major `nrows × nrows`.
    binv: Vec<f64>,
    pub xb: Vec<f64>,
    iterations: usize,
    max_iterations: usize,
}

impl<'a> Tableau<'a> {
    pub fn new(sf: &'a StandardForm) -> Self {
        let m = sf.nrows;
        let mut binv = vec![0.0; m * m];
        for r in 0..m {
            binv[r * m + r] = 1.0;
        }
        let mut is_basic = vec![false; sf.cols.len()];
        for &j in &sf.initial_basis {
            is_basic[j] = true;
        }
        Tableau {
            sf,
            basis: sf.initial_basis.clone(),
            is_basic,
            binv,
            xb: sf.rhs.clone(),
            iterations: 0,
            max_iterations: 50_000 + 50 * (sf.cols.len() + m),
        }
    }

    fn m(&self) -> usize {
        self.sf.nrows
    }

    /// `y = c_B^T B^{-1}`.
    pub fn duals(&self, cost: &[f64]) -> Vec<f64> {
        let m = self.m();
        let mut y = vec![0.0; m];
        for k in 0..m {
            let cb = cost[self.basis[k]];
            if cb != 0.0 {
                let row = &self.binv[k * m..(k + 1) * m];
                for (yr, b) in y.iter_mut().zip(row) {
                    *yr += cb * b;
                }
            }
        }
        y
    }

    pub fn objective(&self, cost: &[f64]) -> f64 {
        self.basis
            .iter()
            .zip(&self.xb)
            .map(|(&j, &x)| cost[j] * x)
            .sum()
    }

    fn column_times_binv(&self, j: usize) -> Vec<f64> {
        let m = self.m();
        let mut w = vec![0.0; m];
        for &(r, a) in &self.sf.cols[j] {
            for (k, wk) in w.iter_mut().enumerate() {
                *wk += self.binv[k * m + r] * a;
            }
        }
        w
    }

    fn reduced_cost(&self, j: usize, cost: &[f64], y: &[f64]) -> f64 {
        cost[j] - self.sf.cols[j].iter().map(|&(r, a)| y[r] * a).sum::<f64>()
    }

    fn pivot(&mut self, leave_row: usize, enter: usize, w: &[f64]) {
        let m = self.m();
        let piv = w[leave_row];
        let step = self.xb[leave_row] / piv;
        for (k, &wk) in w.iter().enumerate().take(m) {
            if k != leave_row && wk != 0.0 {
                self.xb[k] -= step * wk;
                if self.xb[k] < 0.0 && self.xb[k] > -1e-11 {
                    self.xb[k] = 0.0;
                }
            }
        }
        self.xb[leave_row] = step;
        let (before, rest) = self.binv.split_at_mut(leave_row * m);
        let (prow, after) = rest.split_at_mut(m);
        for v in prow.iter_mut() {
            *v /= piv;
        }
        for (k, row) in before.chunks_mut(m).enumerate() {
            let f = w[k];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
            }
        }
        for (k, row) in after.chunks_mut(m).enumerate() {
            let f = w[leave_row + 1 + k];
            if f != 0.0 {
                for (v, p) in row.iter_mut().zip(prow.iter()) {
                    *v -= f * p;
                }
            }
        }
        self.is_basic[self.basis[leave_row]] = false;
        self.is_basic[enter] = true;
        self.basis[leave_row] = enter;
    }

    /// Recomputes `B^{-1}` by Gauss-Jordan elimination and `x_B = B^{-1} b`.
    fn refactor(&mut self) -> Result<()> {
        let m = self.m();
        let mut a = vec![0.0; m * m];
        for (k, &j) in self.basis.iter().enumerate() {
            for &(r, v) in &self.sf.cols[j] {
                a[r * m + k] = v;
            }
        }
        let mut inv = vec![0.0; m * m];
        for r in 0..m {
            inv[r * m + r] = 1.0;
        }
        for c in 0..m {
            let (p, pv) = (c..m)
                .map(|r| (r, a[r * m + c].abs()))
                .max_by(|x, y| x.1.total_cmp(&y.1))
                .unwrap();
            if pv < 1e-13 {
                return Err(Error::LpFailure(
                    "singular basis during refactorization".into(),
                ));
            }
            if p != c {
                for k in 0..m {
                    a.swap(p * m + k, c * m + k);
                    inv.swap(p * m + k, c * m + k);
                }
            }
            let d = a[c * m + c];
            for k in 0..m {
                a[c * m + k] /= d;
                inv[c * m + k] /= d;
            }
            for r in 0..m {
                if r != c {
                    let f = a[r * m + c];
                    if f != 0.0 {
                        for k in 0..m {
                            a[r * m + k] -= f * a[c * m + k];
                            inv[r * m + k] -= f * inv[c * m + k];
                        }
                    }
                }
            }
        }
        self.binv = inv;
        for k in 0..m {
            let row = &self.binv[k * m..(k + 1) * m];
            let v: f64 = row.iter().zip(&self.sf.rhs).map(|(b, r)| b * r).sum();
            self.xb[k] = if v < 0.0 && v > -1e-11 { 0.0 } else { v };
        }
        Ok(())
    }

    /// Runs simplex iterations on `cost` over the columns accepted by `allowed`.
    pub fn optimize(&mut self, cost: &[f64], allowed: &dyn Fn(usize) -> bool) -> Result<Status> {
        let ncols = self.sf.cols.len();
        let mut degenerate_streak = 0usize;
        let mut since_refactor = 0usize;
        loop {
            if self.iterations >= self.max_iterations {
                return Err(Error::LpFailure(format!(
                    "iteration limit {} reached",
                    self.max_iterations
                )));
            }
            if since_refactor >= REFACTOR_EVERY {
                self.refactor()?;
                since_refactor = 0;
            }
            let bland = degenerate_streak >= DEGENERATE_STREAK_FOR_BLAND;
            let y = self.duals(cost);
            let mut enter = None;
            let mut best = -OPT_TOL;
            for j in 0..ncols {
                if self.is_basic[j] || !allowed(j) {
                    continue;
                }
                let d = self.reduced_cost(j, cost, &y);
                if d < best {
                    enter = Some(j);
                    if bland {
                        break;
                    }
                    best = d;
                }
            }
            let Some(enter) = enter else {
                return Ok(Status::Optimal);
            };
            let w = self.column_times_binv(enter);
            let mut leave: Option<(usize, f64)> = None;
            for (k, &wk) in w.iter().enumerate() {
                if wk > PIVOT_TOL {
                    let ratio = self.xb[k].max(0.0) / wk;
                    leave = match leave {
                        None => Some((k, ratio)),
                        Some((lk, lr)) => {
                            if ratio < lr - 1e-12
                                || (ratio <= lr + 1e-12 && self.basis[k] < self.basis[lk])
                            {
                                Some((k, ratio))
                            } else {
                                Some((lk, lr))
                            }
                        }
                    };
                }
            }
            let Some((leave_row, ratio)) = leave else {
                return Ok(Status::Unbounded);
            };
            if ratio <= 1e-12 {
                degenerate_streak += 1;
            } else {
                degenerate_streak = 0;
            }
            self.pivot(leave_row, enter, &w);
            self.iterations += 1;
            since_refactor += 1;
        }
    }

    /// Pivots basic artificials out on any usable structural column. Rows
    /// where none exists are redundant; their artificial stays basic at 0.
    pub fn drive_out_artificials(&mut self) -> Result<()> {
        let m = self.m();
        let first_art = self.sf.first_artificial;
        for k in 0..m {
            if self.basis[k] < first_art {
                continue;
            }
            let row: Vec<f64> = self.binv[k * m..(k + 1) * m].to_vec();
            let mut best: Option<(usize, f64)> = None;
            for j in 0..first_art {
                if self.is_basic[j] {
                    continue;
                }
                let v: f64 = self.sf.cols[j].iter().map(|&(r, a)| row[r] * a).sum();
                if v.abs() > PIVOT_TOL && best.is_none_or(|(_, bv)| v.abs() > bv) {
                    best = Some((j, v.abs()));
                }
            }
            if let Some((j, _)) = best {
                let w = self.column_times_binv(j);
                self.pivot(k, j, &w);
            }
        }
        self.refactor()
    }
}
