use crate::bundle::Bundle;
use crate::economy::{Economy, PriceVector};
use crate::error::{Error, Result};
use crate::lp::{solve, LpOutcome, LpProblem, RowKind, Sense};

/// Column enumeration guard for the fractional program.
pub const MAX_LP_ITEMS: usize = 16;

/// Weights `x_i^D` of a fractional allocation; only positive entries are kept.
#[derive(Debug, Clone, PartialEq)]
pub struct FractionalAllocation {
    pub weights: Vec<(usize, Bundle, f64)>,
}

impl FractionalAllocation {
    pub fn value(&self, e: &Economy) -> f64 {
        self.weights
            .iter()
            .map(|&(i, d, x)| x * e.valuation(i).value(d))
            .sum()
    }

    /// Total weight per agent.
    pub fn agent_mass(&self, num_agents: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_agents];
        for &(i, _, x) in &self.weights {
            out[i] += x;
        }
        out
    }

    /// Total weight of bundles containing each item.
    pub fn item_mass(&self, num_items: usize) -> Vec<f64> {
        let mut out = vec![0.0; num_items];
        for &(_, d, x) in &self.weights {
            for j in d.items() {
                out[j] += x;
            }
        }
        out
    }
}

/// Optimal solution of the dual program: item prices and agent utilities.
#[derive(Debug, Clone, PartialEq)]
pub struct DualSolution {
    pub item_prices: PriceVector,
    pub agent_utilities: Vec<f64>,
}

impl DualSolution {
    /// `Σ_j p_j + Σ_i π_i`.
    pub fn objective(&self) -> f64 {
        self.item_prices.as_slice().iter().sum::<f64>() + self.agent_utilities.iter().sum::<f64>()
    }

    /// Largest violation of `Σ_{j∈D} p_j + π_i ≥ v_i(D)` over all agents and bundles.
    pub fn max_violation(&self, e: &Economy) -> f64 {
        let totals = self.item_prices.bundle_totals();
        let mut worst = 0.0f64;
        for (i, pi) in self.agent_utilities.iter().enumerate() {
            for (mask, v) in e.valuation(i).table().iter().enumerate() {
                worst = worst.max(v - totals[mask] - pi);
            }
        }
        worst
    }
}

struct Solved {
    primal: FractionalAllocation,
    value: f64,
    dual: DualSolution,
}

fn solve_fractional(e: &Economy) -> Result<Solved> {
    let m = e.num_items();
    let n = e.num_agents();
    if m > MAX_LP_ITEMS {
        return Err(Error::TooManyItems {
            got: m,
            limit: MAX_LP_ITEMS,
        });
    }
    let mut lp = LpProblem::new(Sense::Maximize);
    // Zero-valued columns can never improve the objective and their dual
    // constraints hold trivially, so they are left out.
    let mut columns = Vec::new();
    for i in 0..n {
        let v = e.valuation(i);
        for d in Bundle::all(m).skip(1) {
            let value = v.value(d);
            if value > 0.0 {
                lp.add_variable(value);
                columns.push((i, d));
            }
        }
    }
    let mut item_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); m];
    let mut agent_rows: Vec<Vec<(usize, f64)>> = vec![Vec::new(); n];
    for (k, &(i, d)) in columns.iter().enumerate() {
        for j in d.items() {
            item_rows[j].push((k, 1.0));
        }
        agent_rows[i].push((k, 1.0));
    }
    for terms in &item_rows {
        lp.add_row(RowKind::Le, 1.0, terms)?;
    }
    for terms in &agent_rows {
        lp.add_row(RowKind::Le, 1.0, terms)?;
    }
    let sol = match solve(&lp)? {
        LpOutcome::Optimal(sol) => sol,
        other => {
            return Err(Error::LpFailure(format!(
                "fractional program ended as {other:?}"
            )))
        }
    };
    let weights = columns
        .iter()
        .zip(&sol.x)
        .filter(|(_, &x)| x > 1e-12)
        .map(|(&(i, d), &x)| (i, d, x))
        .collect();
    let prices: Vec<f64> = sol.duals[..m].iter().map(|p| p.max(0.0)).collect();
    let utilities: Vec<f64> = sol.duals[m..].iter().map(|p| p.max(0.0)).collect();
    Ok(Solved {
        primal: FractionalAllocation { weights },
        value: sol.objective,
        dual: DualSolution {
            item_prices: PriceVector::new(prices)?,
            agent_utilities: utilities,
        },
    })
}

/// Maximum-value fractional allocation and its value `M_F`.
pub fn fractional_optimum(e: &Economy) -> Result<(FractionalAllocation, f64)> {
    let s = solve_fractional(e)?;
    Ok((s.primal, s.value))
}

/// An optimal solution of the dual program (item prices `p`, utilities `π`).
pub fn dual_prices(e: &Economy) -> Result<DualSolution> {
    Ok(solve_fractional(e)?.dual)
}
