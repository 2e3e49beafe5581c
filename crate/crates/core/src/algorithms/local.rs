use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::Bundle;
use crate::economy::{Allocation, Economy, PriceVector};
use crate::equilibrium::{EquilibriumVerdict, Witness};
use crate::error::{Error, Result};
use crate::tolerance::eps;

use super::PriceRule;

fn require_total(e: &Economy, f: &Allocation) -> Result<()> {
    e.check_allocation(f)?;
    match f.first_unallocated() {
        Some(j) => Err(Error::PartialAllocation(j)),
        None => Ok(()),
    }
}

/// Every single-item transfer `(from, to, item, gain)` with `gain > threshold`,
/// in item-major, recipient-minor order.
fn transfers(e: &Economy, f: &Allocation, bundles: &[Bundle], threshold: f64) -> Vec<Witness> {
    let mut out = Vec::new();
    for j in 0..e.num_items() {
        let Some(from) = f.owner(j) else { continue };
        let held = bundles[from];
        let keep = e.valuation(from).item_marginal(j, held.without(j));
        for (to, &other) in bundles.iter().enumerate() {
            if to == from {
                continue;
            }
            let gain = e.valuation(to).item_marginal(j, other) - keep;
            if gain > threshold {
                out.push(Witness::Transfer {
                    from,
                    to,
                    item: j,
                    gain,
                });
            }
        }
    }
    out
}

/// No single-item transfer between two agents raises social value by more than ε.
/// Only total allocations are considered.
pub fn is_local_optimum(e: &Economy, f: &Allocation) -> Result<EquilibriumVerdict> {
    require_total(e, f)?;
    let bundles = f.bundles(e.num_agents());
    Ok(EquilibriumVerdict::from_violations(transfers(
        e,
        f,
        &bundles,
        eps(),
    )))
}

/// How an improving transfer is picked when several exist.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ImprovementRule {
    First,
    #[default]
    Best,
    Random,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SearchPolicy {
    pub rule: ImprovementRule,
    pub seed: u64,
    /// Strict-improvement threshold; must be positive.
    pub min_gain: f64,
    pub move_cap: usize,
}

impl Default for SearchPolicy {
    fn default() -> Self {
        SearchPolicy {
            rule: ImprovementRule::Best,
            seed: 0,
            min_gain: eps(),
            move_cap: 1_000_000,
        }
    }
}

/// One executed transfer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Move {
    pub from: usize,
    pub to: usize,
    pub item: usize,
    pub gain: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchStatus {
    Converged,
    /// Improving moves remained when the move cap was hit.
    MoveCapReached,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub allocation: Allocation,
    pub moves: Vec<Move>,
    pub status: SearchStatus,
}

/// Repeatedly applies improving single-item transfers until none remains.
/// Social value strictly increases by more than `min_gain` per move.
pub fn local_optimum_search(
    e: &Economy,
    f0: &Allocation,
    policy: &SearchPolicy,
) -> Result<SearchOutcome> {
    require_total(e, f0)?;
    if !(policy.min_gain > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "min_gain must be positive, got {}",
            policy.min_gain
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(policy.seed);
    let mut f = f0.clone();
    let mut bundles = f.bundles(e.num_agents());
    let mut moves = Vec::new();
    loop {
        let candidates = transfers(e, &f, &bundles, policy.min_gain);
        if candidates.is_empty() {
            return Ok(SearchOutcome {
                allocation: f,
                moves,
                status: SearchStatus::Converged,
            });
        }
        if moves.len() >= policy.move_cap {
            return Ok(SearchOutcome {
                allocation: f,
                moves,
                status: SearchStatus::MoveCapReached,
            });
        }
        let pick = match policy.rule {
            ImprovementRule::First => 0,
            ImprovementRule::Best => {
                let mut best = 0;
                for (k, w) in candidates.iter().enumerate() {
                    if gain_of(w) > gain_of(&candidates[best]) {
                        best = k;
                    }
                }
                best
            }
            ImprovementRule::Random => rng.gen_range(0..candidates.len()),
        };
        let Witness::Transfer {
            from,
            to,
            item,
            gain,
        } = candidates[pick]
        else {
            unreachable!("transfers only yields transfer witnesses")
        };
        bundles[from] = bundles[from].without(item);
        bundles[to] = bundles[to].with(item);
        f.assign(item, Some(to));
        moves.push(Move {
            from,
            to,
            item,
            gain,
        });
    }
}

fn gain_of(w: &Witness) -> f64 {
    match w {
        Witness::Transfer { gain, .. } => *gain,
        _ => f64::NEG_INFINITY,
    }
}

/// Per-item suitable price interval `(lo, hi)`: `lo` is the best competitor's
/// marginal `max_{k ≠ f(j)} v_k(j | S_k)` (0 without competitors) and `hi` is
/// the owner's marginal `v_{f(j)}(j | S_{f(j)} − j)`. Requires a total allocation.
pub fn price_bands(e: &Economy, f: &Allocation) -> Result<Vec<(f64, f64)>> {
    require_total(e, f)?;
    let bundles = f.bundles(e.num_agents());
    Ok((0..e.num_items())
        .map(|j| {
            let owner = f.owner(j).expect("total allocation");
            let hi = e
                .valuation(owner)
                .item_marginal(j, bundles[owner].without(j));
            let lo = bundles
                .iter()
                .enumerate()
                .filter(|&(k, _)| k != owner)
                .map(|(k, &b)| e.valuation(k).item_marginal(j, b))
                .fold(0.0f64, f64::max);
            (lo, hi)
        })
        .collect())
}

/// Supporting prices `p_j = lo + λ (hi − lo)` at a local optimum.
pub fn supporting_prices(e: &Economy, f: &Allocation, rule: PriceRule) -> Result<PriceVector> {
    let verdict = is_local_optimum(e, f)?;
    if let Some(Witness::Transfer {
        from,
        to,
        item,
        gain,
    }) = verdict.violations.first()
    {
        return Err(Error::NotLocalOptimum(format!(
            "moving item {item} from agent {from} to agent {to} gains {gain}"
        )));
    }
    let lambda = rule.lambda();
    let prices = price_bands(e, f)?
        .into_iter()
        // lo may exceed hi by at most ε at a local optimum.
        .map(|(lo, hi)| lo + lambda * (hi.max(lo) - lo))
        .collect();
    PriceVector::new(prices)
}
