use crate::bundle::Bundle;
use crate::economy::{Allocation, Economy, PriceVector};
use crate::equilibrium::Quality;
use crate::error::{Error, Result};
use crate::lp::{minimum_violation, LpProblem, RowKind, Sense};
use crate::tolerance::{eps, BISECTION_MAX_ITERS, BISECTION_TOL, SEARCH_FEAS_TOL};

/// Restriction on the price vectors searched over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PriceShape {
    /// Any nonnegative vector with unallocated items at 0.
    #[default]
    Free,
    /// One common price for every item (forced to 0 if an item is unallocated).
    Uniform,
}

/// Result of a quality maximization over prices.
#[derive(Debug, Clone, PartialEq)]
pub struct QualitySearch {
    pub q_star: Quality,
    /// Prices attaining `q_star` (within the bisection tolerance).
    pub prices: PriceVector,
}

/// Maps items to LP variables. Unallocated items have no variable (price 0).
struct PriceVars {
    var_of: Vec<Option<usize>>,
    num_vars: usize,
}

impl PriceVars {
    fn new(f: &Allocation, shape: PriceShape) -> Self {
        match shape {
            PriceShape::Free => {
                let mut next = 0;
                let var_of = f
                    .assignment()
                    .iter()
                    .map(|owner| {
                        owner.map(|_| {
                            next += 1;
                            next - 1
                        })
                    })
                    .collect();
                PriceVars {
                    var_of,
                    num_vars: next,
                }
            }
            PriceShape::Uniform => {
                let common = f.is_total().then_some(0);
                PriceVars {
                    var_of: vec![common; f.num_items()],
                    num_vars: usize::from(common.is_some()),
                }
            }
        }
    }

    fn terms(&self, bundle: Bundle, coef: f64) -> Vec<(usize, f64)> {
        bundle
            .items()
            .filter_map(|j| self.var_of[j].map(|v| (v, coef)))
            .collect()
    }

    fn prices(&self, x: &[f64], scale: f64) -> Result<PriceVector> {
        PriceVector::new(
            self.var_of
                .iter()
                .map(|v| v.map_or(0.0, |v| (x[v] * scale).max(0.0)))
                .collect(),
        )
    }

    fn problem(&self) -> LpProblem {
        let mut lp = LpProblem::new(Sense::Minimize);
        lp.add_variables(self.num_vars, 0.0);
        lp
    }
}

/// Outward-stability constraints `(agent, A, v_i(A | S_i))` with a positive marginal.
fn outward_rows(e: &Economy, f: &Allocation) -> Vec<(usize, Bundle, f64)> {
    let tol = eps();
    let full = e.full_bundle();
    let mut rows = Vec::new();
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let v = e.valuation(i);
        for a in full.difference(held).subsets().skip(1) {
            let w = v.marginal(a, held);
            if w > tol {
                rows.push((i, a, w));
            }
        }
    }
    rows
}

/// The local-equilibrium system at quality `q` in scaled prices `u = p / q`:
/// `u(A) ≥ v_i(A | S_i)` and `u(S_i) ≤ v_i(S_i) / q²`. Keeping the outward
/// rows fixed and moving only the IR bounds keeps the system well scaled
/// across the whole bisection range.
fn scaled_local_system(
    e: &Economy,
    f: &Allocation,
    vars: &PriceVars,
    outward: &[(usize, Bundle, f64)],
    q: f64,
) -> Result<LpProblem> {
    let mut lp = vars.problem();
    for &(_, a, w) in outward {
        lp.add_row(RowKind::Ge, w, &vars.terms(a, 1.0))?;
    }
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        if !held.is_empty() {
            let bound = e.valuation(i).value(held) / (q * q);
            lp.add_row(RowKind::Le, bound, &vars.terms(held, 1.0))?;
        }
    }
    Ok(lp)
}

/// A point of `lp` if its least violation is below `SEARCH_FEAS_TOL · scale`.
fn feasible_point(lp: &LpProblem, scale: f64) -> Result<Option<Vec<f64>>> {
    let (t, x) = minimum_violation(lp)?;
    Ok((t <= SEARCH_FEAS_TOL * scale).then_some(x))
}

/// Tolerance scale of the scaled local system. It must not grow with the IR
/// bounds `v / q²`, otherwise small `q` would tolerate violations of order one
/// in the outward rows.
fn local_scale(e: &Economy, f: &Allocation, outward: &[(usize, Bundle, f64)]) -> f64 {
    let held = f
        .bundles(e.num_agents())
        .into_iter()
        .enumerate()
        .map(|(i, b)| e.valuation(i).value(b));
    outward.iter().map(|r| r.2).chain(held).fold(1.0, f64::max)
}

fn check_q(q: f64) -> Result<()> {
    if !(q >= 0.0 && q.is_finite()) {
        return Err(Error::InvalidParameter(format!(
            "quality must be finite and nonnegative, got {q}"
        )));
    }
    Ok(())
}

/// Prices making `(f, p)` a `(q, q)`-local equilibrium, if any exist.
pub fn local_feasible_at(
    e: &Economy,
    f: &Allocation,
    q: f64,
    shape: PriceShape,
) -> Result<Option<PriceVector>> {
    e.check_allocation(f)?;
    check_q(q)?;
    let vars = PriceVars::new(f, shape);
    if q == 0.0 {
        return Ok(Some(PriceVector::zeros(e.num_items())));
    }
    let outward = outward_rows(e, f);
    let lp = scaled_local_system(e, f, &vars, &outward, q)?;
    feasible_point(&lp, local_scale(e, f, &outward))?
        .map(|x| vars.prices(&x, q))
        .transpose()
}

/// The supremum `q` for which prices exist making `(f, p)` a `(q, q)`-local
/// equilibrium, with witnessing prices.
pub fn max_q_for_allocation(e: &Economy, f: &Allocation) -> Result<QualitySearch> {
    max_q_for_allocation_with(e, f, PriceShape::Free)
}

/// [`max_q_for_allocation`] restricted to a price shape.
pub fn max_q_for_allocation_with(
    e: &Economy,
    f: &Allocation,
    shape: PriceShape,
) -> Result<QualitySearch> {
    e.check_allocation(f)?;
    let vars = PriceVars::new(f, shape);
    let outward = outward_rows(e, f);
    let zeros = PriceVector::zeros(e.num_items());
    if outward.is_empty() {
        return Ok(QualitySearch {
            q_star: Quality::Infinite,
            prices: zeros,
        });
    }
    let scale = local_scale(e, f, &outward);
    let feasible = |q: f64| -> Result<Option<PriceVector>> {
        let lp = scaled_local_system(e, f, &vars, &outward, q)?;
        feasible_point(&lp, scale)?
            .map(|x| vars.prices(&x, q))
            .transpose()
    };

    // Any feasible q satisfies w ≤ u(A) ≤ Σ_k v_k(S_k) / q² for each outward row,
    // which bounds q by sqrt(m · max_k v_k(X) / w).
    let v_max = (0..e.num_agents())
        .map(|i| e.valuation(i).value(e.full_bundle()))
        .fold(0.0f64, f64::max);
    let w_min = outward.iter().map(|r| r.2).fold(f64::INFINITY, f64::min);
    let mut hi = (1.0 + v_max).max((e.num_items() as f64 * v_max / w_min).sqrt() * 1.001 + 1e-6);
    let mut lo = 0.0;
    let mut best = zeros;
    if let Some(p) = feasible(hi)? {
        // Unreachable by the bound above; kept as a guard against rounding.
        lo = hi;
        best = p;
        hi *= 2.0;
    }
    let mut iters = 0;
    while hi - lo > BISECTION_TOL && iters < BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        match feasible(mid)? {
            Some(p) => {
                lo = mid;
                best = p;
            }
            None => hi = mid,
        }
        iters += 1;
    }
    Ok(QualitySearch {
        q_star: Quality::Finite(lo),
        prices: best,
    })
}

/// Prices making `(f, p)` a `q`-quasi-Walrasian equilibrium, if any exist:
/// `p(S_i) − q·p(A) ≤ v_i(S_i) − q·v_i(A)` for all `i` and `A`.
pub fn quasi_feasible_at(e: &Economy, f: &Allocation, q: f64) -> Result<Option<PriceVector>> {
    e.check_allocation(f)?;
    check_q(q)?;
    let vars = PriceVars::new(f, PriceShape::Free);
    let mut lp = vars.problem();
    let all = Bundle::all(e.num_items()).collect::<Vec<_>>();
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let v = e.valuation(i);
        let held_value = v.value(held);
        for &a in &all {
            if a == held {
                continue;
            }
            let mut terms = vars.terms(held.difference(a), 1.0);
            terms.extend(vars.terms(a.difference(held), -q));
            terms.extend(vars.terms(a.intersection(held), 1.0 - q));
            lp.add_row(RowKind::Le, held_value - q * v.value(a), &terms)?;
        }
    }
    let scale = lp.rhs_scale();
    feasible_point(&lp, scale)?
        .map(|x| vars.prices(&x, 1.0))
        .transpose()
}

/// The largest `q ∈ [0, 1]` for which some prices make `f` a `q`-quasi-Walrasian
/// equilibrium, with witnessing prices.
pub fn max_quasi_q_for_allocation(e: &Economy, f: &Allocation) -> Result<(f64, PriceVector)> {
    e.check_allocation(f)?;
    if let Some(p) = quasi_feasible_at(e, f, 1.0)? {
        return Ok((1.0, p));
    }
    let mut lo = 0.0;
    let mut hi = 1.0;
    let mut best = PriceVector::zeros(e.num_items());
    let mut iters = 0;
    while hi - lo > BISECTION_TOL && iters < BISECTION_MAX_ITERS {
        let mid = 0.5 * (lo + hi);
        match quasi_feasible_at(e, f, mid)? {
            Some(p) => {
                lo = mid;
                best = p;
            }
            None => hi = mid,
        }
        iters += 1;
    }
    Ok((lo, best))
}
