//! Linear programming: a general dense-basis simplex solver, a feasibility
//! oracle, and the fractional allocation program with its dual.

mod fractional;
mod simplex;

use std::fmt::Write as _;

pub use fractional::{
    dual_prices, fractional_optimum, DualSolution, FractionalAllocation, MAX_LP_ITEMS,
};

use crate::error::{Error, Result};
use crate::tolerance::FEAS_TOL;
use simplex::{StandardForm, Status, Tableau};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sense {
    Maximize,
    Minimize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RowKind {
    Le,
    Ge,
    Eq,
}

/// `opt c·x` subject to row constraints and `x ≥ 0`, stored column-wise.
#[derive(Debug, Clone)]
pub struct LpProblem {
    sense: Sense,
    costs: Vec<f64>,
    columns: Vec<Vec<(usize, f64)>>,
    rows: Vec<(RowKind, f64)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective: f64,
    /// One multiplier per row. Nonnegative on `≤` rows of a maximization and
    /// `≥` rows of a minimization; `Σ duals·rhs` equals `objective` at optimum.
    /// Empty for pure feasibility solves.
    pub duals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum LpOutcome {
    Optimal(LpSolution),
    Infeasible,
    Unbounded,
}

impl LpOutcome {
    pub fn is_feasible(&self) -> bool {
        !matches!(self, LpOutcome::Infeasible)
    }

    pub fn solution(&self) -> Option<&LpSolution> {
        match self {
            LpOutcome::Optimal(s) => Some(s),
            _ => None,
        }
    }
}

impl LpProblem {
    pub fn new(sense: Sense) -> Self {
        LpProblem {
            sense,
            costs: Vec::new(),
            columns: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn sense(&self) -> Sense {
        self.sense
    }

    pub fn add_variable(&mut self, cost: f64) -> usize {
        self.costs.push(cost);
        self.columns.push(Vec::new());
        self.costs.len() - 1
    }

    pub fn add_variables(&mut self, count: usize, cost: f64) -> std::ops::Range<usize> {
        let start = self.costs.len();
        for _ in 0..count {
            self.add_variable(cost);
        }
        start..self.costs.len()
    }

    /// Adds `Σ coef·x_var (kind) rhs`; repeated variables are summed.
    pub fn add_row(&mut self, kind: RowKind, rhs: f64, coeffs: &[(usize, f64)]) -> Result<usize> {
        let row = self.rows.len();
        if !rhs.is_finite() {
            return Err(Error::MalformedLp(format!("row {row} has non-finite rhs")));
        }
        for &(var, coef) in coeffs {
            if var >= self.costs.len() {
                return Err(Error::MalformedLp(format!(
                    "row {row} references variable {var}, only {} exist",
                    self.costs.len()
                )));
            }
            if !coef.is_finite() {
                return Err(Error::MalformedLp(format!(
                    "row {row} has non-finite coefficient"
                )));
            }
        }
        self.rows.push((kind, rhs));
        for &(var, coef) in coeffs {
            let col = &mut self.columns[var];
            match col.last_mut() {
                Some((r, c)) if *r == row => *c += coef,
                _ => col.push((row, coef)),
            }
        }
        Ok(row)
    }

    /// `max(1, max_k |b_k|)`, the scale feasibility tolerances are relative to.
    pub fn rhs_scale(&self) -> f64 {
        self.rows.iter().fold(1.0f64, |m, &(_, b)| m.max(b.abs()))
    }

    pub fn num_vars(&self) -> usize {
        self.costs.len()
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    /// `A x` per row.
    pub fn row_activity(&self, x: &[f64]) -> Vec<f64> {
        let mut act = vec![0.0; self.rows.len()];
        for (col, &xj) in self.columns.iter().zip(x) {
            for &(r, a) in col {
                act[r] += a * xj;
            }
        }
        act
    }

    /// Largest violation of any row or sign constraint at `x`.
    pub fn max_violation(&self, x: &[f64]) -> f64 {
        let act = self.row_activity(x);
        let rows = self
            .rows
            .iter()
            .zip(&act)
            .map(|(&(kind, rhs), &a)| match kind {
                RowKind::Le => a - rhs,
                RowKind::Ge => rhs - a,
                RowKind::Eq => (a - rhs).abs(),
            });
        let signs = x.iter().map(|&v| -v);
        rows.chain(signs).fold(0.0, f64::max)
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        self.costs.iter().zip(x).map(|(c, v)| c * v).sum()
    }

    /// Plain-text listing of the instance, one line per variable and row.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let sense = match self.sense {
            Sense::Maximize => "max",
            Sense::Minimize => "min",
        };
        let _ = writeln!(out, "sense {sense}");
        let _ = writeln!(out, "vars {} rows {}", self.num_vars(), self.num_rows());
        for (j, c) in self.costs.iter().enumerate() {
            let _ = writeln!(out, "cost x{j} {c}");
        }
        let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); self.rows.len()];
        for (j, col) in self.columns.iter().enumerate() {
            for &(r, a) in col {
                by_row[r].push((j, a));
            }
        }
        for (r, ((kind, rhs), terms)) in self.rows.iter().zip(&by_row).enumerate() {
            let op = match kind {
                RowKind::Le => "<=",
                RowKind::Ge => ">=",
                RowKind::Eq => "=",
            };
            let lhs: Vec<String> = terms.iter().map(|(j, a)| format!("{a}*x{j}")).collect();
            let _ = writeln!(out, "row r{r}: {} {op} {rhs}", lhs.join(" + "));
        }
        out
    }

    fn to_standard_form(&self) -> (StandardForm, Vec<f64>) {
        let nrows = self.rows.len();
        let nvars = self.costs.len();
        let mut flip = vec![1.0; nrows];
        let mut rhs = vec![0.0; nrows];
        // Normalize to b ≥ 0; a flipped ≤ row becomes ≥ and vice versa.
        for (r, &(_, b)) in self.rows.iter().enumerate() {
            if b < 0.0 {
                flip[r] = -1.0;
            }
            rhs[r] = b * flip[r];
        }
        let mut cols: Vec<Vec<(usize, f64)>> = self
            .columns
            .iter()
            .map(|col| col.iter().map(|&(r, a)| (r, a * flip[r])).collect())
            .collect();
        let mut initial_basis = vec![usize::MAX; nrows];
        // Slack / surplus columns.
        for (r, &(kind, _)) in self.rows.iter().enumerate() {
            let effective = match (kind, flip[r] < 0.0) {
                (RowKind::Le, false) | (RowKind::Ge, true) => Some(1.0),
                (RowKind::Ge, false) | (RowKind::Le, true) => Some(-1.0),
                (RowKind::Eq, _) => None,
            };
            if let Some(sign) = effective {
                cols.push(vec![(r, sign)]);
                if sign > 0.0 {
                    initial_basis[r] = cols.len() - 1;
                }
            }
        }
        let first_artificial = cols.len();
        for (r, slot) in initial_basis.iter_mut().enumerate() {
            if *slot == usize::MAX {
                cols.push(vec![(r, 1.0)]);
                *slot = cols.len() - 1;
            }
        }
        debug_assert!(nvars <= first_artificial);
        (
            StandardForm {
                nrows,
                cols,
                rhs,
                first_artificial,
                initial_basis,
            },
            flip,
        )
    }
}

/// Solves an LP to optimality with the two-phase revised simplex method.
pub fn solve(prob: &LpProblem) -> Result<LpOutcome> {
    let nvars = prob.num_vars();
    let (sf, flip) = prob.to_standard_form();
    let ncols = sf.cols.len();
    let first_art = sf.first_artificial;
    let mut tab = Tableau::new(&sf);

    if first_art < ncols {
        let phase1: Vec<f64> = (0..ncols)
            .map(|j| if j >= first_art { 1.0 } else { 0.0 })
            .collect();
        tab.optimize(&phase1, &|_| true)?;
        let scale = sf.rhs.iter().fold(1.0f64, |m, b| m.max(b.abs()));
        if tab.objective(&phase1) > FEAS_TOL * scale {
            return Ok(LpOutcome::Infeasible);
        }
        tab.drive_out_artificials()?;
    }

    let sign = match prob.sense {
        Sense::Minimize => 1.0,
        Sense::Maximize => -1.0,
    };
    let mut cost = vec![0.0; ncols];
    for (j, c) in prob.costs.iter().enumerate() {
        cost[j] = sign * c;
    }
    match tab.optimize(&cost, &|j| j < first_art)? {
        Status::Unbounded => return Ok(LpOutcome::Unbounded),
        Status::Optimal => {}
    }

    let mut x = vec![0.0; nvars];
    for (k, &j) in tab.basis.iter().enumerate() {
        if j < nvars {
            x[j] = tab.xb[k].max(0.0);
        }
    }
    let duals = tab
        .duals(&cost)
        .into_iter()
        .zip(&flip)
        .map(|(y, f)| sign * y * f)
        .collect();
    Ok(LpOutcome::Optimal(LpSolution {
        objective: prob.objective_value(&x),
        x,
        duals,
    }))
}

/// Decides feasibility of the constraint system of `prob` (its objective is
/// ignored) and returns a point satisfying every row within [`FEAS_TOL`].
///
/// The system is recast as the minimum-violation program
/// `min t s.t. a_k·x − t ≤ b_k, x, t ≥ 0`, which is solved through its dual
/// `max −b·y s.t. Σ_k a_kj y_k ≥ 0, Σ_k y_k ≤ 1, y ≥ 0`. The dual has one
/// row per variable, so systems with very many rows stay cheap; the point
/// `x` is read off the dual's multipliers.
pub fn solve_feasibility(prob: &LpProblem) -> Result<LpOutcome> {
    let (min_violation, x) = minimum_violation(prob)?;
    if min_violation > FEAS_TOL * prob.rhs_scale() {
        return Ok(LpOutcome::Infeasible);
    }
    Ok(LpOutcome::Optimal(LpSolution {
        objective: prob.objective_value(&x),
        x,
        duals: Vec::new(),
    }))
}

/// The least uniform violation `t* = min_x max_k (a_k·x − b_k)^+` of the rows of
/// `prob` over `x ≥ 0`, with a minimizing point. Callers that need a verdict
/// sharper than [`FEAS_TOL`] compare `t*` against their own threshold.
pub fn minimum_violation(prob: &LpProblem) -> Result<(f64, Vec<f64>)> {
    let nvars = prob.num_vars();
    let mut by_row: Vec<Vec<(usize, f64)>> = vec![Vec::new(); prob.num_rows()];
    for (j, col) in prob.columns.iter().enumerate() {
        for &(r, a) in col {
            by_row[r].push((j, a));
        }
    }
    let mut dual = LpProblem::new(Sense::Maximize);
    // Each ≤-normalized row k becomes a dual variable y_k with cost −b_k.
    let mut dual_cols: Vec<(f64, f64, usize)> = Vec::new();
    for (r, &(kind, rhs)) in prob.rows.iter().enumerate() {
        match kind {
            RowKind::Le => dual_cols.push((1.0, rhs, r)),
            RowKind::Ge => dual_cols.push((-1.0, rhs, r)),
            RowKind::Eq => {
                dual_cols.push((1.0, rhs, r));
                dual_cols.push((-1.0, rhs, r));
            }
        }
    }
    for &(s, rhs, _) in &dual_cols {
        dual.add_variable(-s * rhs);
    }
    // Rows: per primal variable j: Σ_k −s_k a_kj y_k ≤ 0; normalization Σ y ≤ 1.
    let mut var_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); nvars];
    for (k, &(s, _, r)) in dual_cols.iter().enumerate() {
        for &(j, a) in &by_row[r] {
            var_rows[j].push((k, -s * a));
        }
    }
    for terms in &var_rows {
        dual.add_row(RowKind::Le, 0.0, terms)?;
    }
    let all: Vec<(usize, f64)> = (0..dual_cols.len()).map(|k| (k, 1.0)).collect();
    dual.add_row(RowKind::Le, 1.0, &all)?;

    let sol = match solve(&dual)? {
        LpOutcome::Optimal(sol) => sol,
        // y = 0 is feasible and the objective is bounded by t*.
        other => {
            return Err(Error::LpFailure(format!(
                "minimum-violation dual ended as {other:?}"
            )))
        }
    };
    let x: Vec<f64> = sol.duals[..nvars].iter().map(|v| v.max(0.0)).collect();
    Ok((sol.objective.max(0.0), x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b}");
    }

    #[test]
    fn small_max_problem_and_duals() {
        // max 3x + 5y s.t. x ≤ 4, 2y ≤ 12, 3x + 2y ≤ 18  → (2, 6), 36
        let mut lp = LpProblem::new(Sense::Maximize);
        let x = lp.add_variable(3.0);
        let y = lp.add_variable(5.0);
        lp.add_row(RowKind::Le, 4.0, &[(x, 1.0)]).unwrap();
        lp.add_row(RowKind::Le, 12.0, &[(y, 2.0)]).unwrap();
        lp.add_row(RowKind::Le, 18.0, &[(x, 3.0), (y, 2.0)])
            .unwrap();
        let sol = solve(&lp).unwrap();
        let sol = sol.solution().unwrap();
        assert_close(sol.objective, 36.0, 1e-9);
        assert_close(sol.x[0], 2.0, 1e-9);
        assert_close(sol.x[1], 6.0, 1e-9);
        assert_close(sol.duals[0], 0.0, 1e-9);
        assert_close(sol.duals[1], 1.5, 1e-9);
        assert_close(sol.duals[2], 1.0, 1e-9);
    }

    #[test]
    fn min_problem_with_ge_and_eq_rows() {
        // min x + 2y s.t. x + y ≥ 2, x − y = 1 → x = 1.5, y = 0.5, obj 2.5
        let mut lp = LpProblem::new(Sense::Minimize);
        let x = lp.add_variable(1.0);
        let y = lp.add_variable(2.0);
        lp.add_row(RowKind::Ge, 2.0, &[(x, 1.0), (y, 1.0)]).unwrap();
        lp.add_row(RowKind::Eq, 1.0, &[(x, 1.0), (y, -1.0)])
            .unwrap();
        let out = solve(&lp).unwrap();
        let sol = out.solution().unwrap();
        assert_close(sol.objective, 2.5, 1e-9);
        let dual_obj: f64 = sol.duals[0] * 2.0 + sol.duals[1] * 1.0;
        assert_close(dual_obj, 2.5, 1e-9);
        assert!(sol.duals[0] >= -1e-12);
    }

    #[test]
    fn negative_rhs_rows_are_normalized() {
        // max x s.t. −x ≥ −3 (x ≤ 3)
        let mut lp = LpProblem::new(Sense::Maximize);
        let x = lp.add_variable(1.0);
        lp.add_row(RowKind::Ge, -3.0, &[(x, -1.0)]).unwrap();
        let sol = solve(&lp).unwrap();
        let sol = sol.solution().unwrap();
        assert_close(sol.objective, 3.0, 1e-9);
        assert_close(sol.duals[0] * -3.0, 3.0, 1e-9);
    }

    #[test]
    fn detects_infeasible_and_unbounded() {
        let mut lp = LpProblem::new(Sense::Maximize);
        let x = lp.add_variable(1.0);
        lp.add_row(RowKind::Le, 1.0, &[(x, 1.0)]).unwrap();
        lp.add_row(RowKind::Ge, 2.0, &[(x, 1.0)]).unwrap();
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Infeasible);
        assert_eq!(solve_feasibility(&lp).unwrap(), LpOutcome::Infeasible);

        let mut lp = LpProblem::new(Sense::Maximize);
        let x = lp.add_variable(1.0);
        lp.add_row(RowKind::Ge, 1.0, &[(x, 1.0)]).unwrap();
        assert_eq!(solve(&lp).unwrap(), LpOutcome::Unbounded);
    }

    #[test]
    fn empty_problem_is_feasible() {
        let lp = LpProblem::new(Sense::Minimize);
        assert!(solve_feasibility(&lp).unwrap().is_feasible());
        let mut lp = LpProblem::new(Sense::Minimize);
        lp.add_variables(3, 0.0);
        let out = solve_feasibility(&lp).unwrap();
        assert_eq!(out.solution().unwrap().x.len(), 3);
    }

    #[test]
    fn feasibility_point_satisfies_rows() {
        // x + y ≥ 3, x ≤ 1, y ≤ 2.5
        let mut lp = LpProblem::new(Sense::Minimize);
        let x = lp.add_variable(0.0);
        let y = lp.add_variable(0.0);
        lp.add_row(RowKind::Ge, 3.0, &[(x, 1.0), (y, 1.0)]).unwrap();
        lp.add_row(RowKind::Le, 1.0, &[(x, 1.0)]).unwrap();
        lp.add_row(RowKind::Le, 2.5, &[(y, 1.0)]).unwrap();
        let out = solve_feasibility(&lp).unwrap();
        let sol = out.solution().unwrap();
        assert!(lp.max_violation(&sol.x) <= FEAS_TOL);
        lp.add_row(RowKind::Le, 1.5, &[(y, 1.0)]).unwrap();
        assert_eq!(solve_feasibility(&lp).unwrap(), LpOutcome::Infeasible);
    }

    #[test]
    fn malformed_rows_are_rejected() {
        let mut lp = LpProblem::new(Sense::Minimize);
        lp.add_variable(0.0);
        assert!(matches!(
            lp.add_row(RowKind::Le, 1.0, &[(3, 1.0)]),
            Err(Error::MalformedLp(_))
        ));
        assert!(lp.add_row(RowKind::Le, f64::NAN, &[(0, 1.0)]).is_err());
        assert!(lp.add_row(RowKind::Le, 1.0, &[(0, f64::INFINITY)]).is_err());
    }

    #[test]
    fn text_dump_lists_rows() {
        let mut lp = LpProblem::new(Sense::Maximize);
        let x = lp.add_variable(1.0);
        lp.add_row(RowKind::Le, 2.0, &[(x, 1.0)]).unwrap();
        let text = lp.to_text();
        assert!(text.contains("sense max"));
        assert!(text.contains("row r0: 1*x0 <= 2"));
    }
}
