use crate::economy::{Allocation, Economy, PriceVector};
use crate::error::{Error, Result};

use super::PriceRule;

/// Stage-by-stage record of a greedy run.
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyTrace {
    pub order: Vec<usize>,
    /// Winner of each stage.
    pub winners: Vec<usize>,
    /// `stage_marginals[k][l] = v_l(j_k | S_l^{k−1})`.
    pub stage_marginals: Vec<Vec<f64>>,
    pub prices: PriceVector,
}

/// Allocates items in `order`, each to the agent with the highest current
/// marginal value (lowest index on ties), priced inside
/// `[second-highest marginal, winning marginal]` according to `rule`.
pub fn greedy_allocate(
    e: &Economy,
    order: &[usize],
    rule: PriceRule,
) -> Result<(Allocation, PriceVector, GreedyTrace)> {
    let m = e.num_items();
    let mut seen = vec![false; m];
    for &j in order {
        if j >= m {
            return Err(Error::ItemOutOfRange {
                index: j,
                num_items: m,
            });
        }
        if std::mem::replace(&mut seen[j], true) {
            return Err(Error::InvalidParameter(format!(
                "item {j} appears twice in the greedy order"
            )));
        }
    }
    if order.len() != m {
        return Err(Error::InvalidParameter(format!(
            "greedy order lists {} of {m} items",
            order.len()
        )));
    }

    let n = e.num_agents();
    let lambda = rule.lambda();
    let mut bundles = vec![crate::bundle::Bundle::EMPTY; n];
    let mut f = Allocation::unallocated(m);
    let mut prices = vec![0.0; m];
    let mut winners = Vec::with_capacity(m);
    let mut stage_marginals = Vec::with_capacity(m);
    for &j in order {
        let marginals: Vec<f64> = (0..n)
            .map(|l| e.valuation(l).item_marginal(j, bundles[l]))
            .collect();
        let mut winner = 0;
        for (l, &w) in marginals.iter().enumerate() {
            if w > marginals[winner] {
                winner = l;
            }
        }
        let hi = marginals[winner];
        let lo = marginals
            .iter()
            .enumerate()
            .filter(|&(l, _)| l != winner)
            .map(|(_, &w)| w)
            .fold(0.0f64, f64::max);
        prices[j] = lo + lambda * (hi - lo);
        bundles[winner] = bundles[winner].with(j);
        f.assign(j, Some(winner));
        winners.push(winner);
        stage_marginals.push(marginals);
    }
    let prices = PriceVector::new(prices)?;
    let trace = GreedyTrace {
        order: order.to_vec(),
        winners,
        stage_marginals,
        prices: prices.clone(),
    };
    Ok((f, prices, trace))
}
