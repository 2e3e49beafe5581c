//! Named example economies with their canonical allocations and prices.

use crate::bundle::Bundle;
use crate::economy::{Allocation, Economy, PriceVector};
use crate::error::{Error, Result};
use crate::valuation::ValuationSpec;

/// An economy together with one allocation and price vector of interest.
#[derive(Debug, Clone, PartialEq)]
pub struct NamedExample {
    pub name: String,
    pub economy: Economy,
    pub allocation: Allocation,
    pub prices: PriceVector,
}

/// Names accepted by [`by_name`].
pub const NAMES: [&str; 7] = [
    "ex-first",
    "ex-welfare-pair",
    "ex-smallq",
    "ex-no-wal",
    "ex-no-eq",
    "ex-asubmod",
    "ex-no-pareto",
];

fn build(
    name: &str,
    items: &[&str],
    agents: Vec<(&str, ValuationSpec)>,
    assignment: Vec<Option<usize>>,
    prices: Vec<f64>,
) -> NamedExample {
    let economy = Economy::from_specs(
        items.iter().map(|s| s.to_string()).collect(),
        agents
            .into_iter()
            .map(|(n, s)| (n.to_string(), s))
            .collect(),
    )
    .expect("catalog economies are valid");
    NamedExample {
        name: name.to_string(),
        economy,
        allocation: Allocation::new(assignment),
        prices: PriceVector::new(prices).expect("catalog prices are nonnegative"),
    }
}

/// Two unit-demand agents with crossed preferences; the crossed allocation
/// `a → 2, b → 1` at prices `(2, 2)`.
pub fn first() -> NamedExample {
    build(
        "ex-first",
        &["a", "b"],
        vec![
            ("1", ValuationSpec::UnitDemand(vec![4.0, 3.0])),
            ("2", ValuationSpec::UnitDemand(vec![3.0, 4.0])),
        ],
        vec![Some(1), Some(0)],
        vec![2.0, 2.0],
    )
}

/// Two budgeted-additive agents; the Walrasian pair `a → 1, b → 2` at `(1.5, 1.5)`.
pub fn welfare_pair() -> NamedExample {
    build(
        "ex-welfare-pair",
        &["a", "b"],
        vec![
            (
                "1",
                ValuationSpec::BudgetedAdditive {
                    values: vec![2.0, 1.0],
                    budget: 2.0,
                },
            ),
            (
                "2",
                ValuationSpec::BudgetedAdditive {
                    values: vec![1.0, 2.0],
                    budget: 2.0,
                },
            ),
        ],
        vec![Some(0), Some(1)],
        vec![1.5, 1.5],
    )
}

/// One item valued 1 and `eps`; the item goes to the low-value agent at price `√eps`.
pub fn small_quality(eps: f64) -> NamedExample {
    build(
        "ex-smallq",
        &["a"],
        vec![
            ("1", ValuationSpec::Additive(vec![1.0])),
            ("2", ValuationSpec::Additive(vec![eps])),
        ],
        vec![Some(1)],
        vec![eps.sqrt()],
    )
}

/// Two agents with the symmetric 0/0/3/4 valuation; everything to agent 1 at `√2` each.
pub fn no_walrasian() -> NamedExample {
    let v = ValuationSpec::Symmetric(vec![0.0, 0.0, 3.0, 4.0]);
    build(
        "ex-no-wal",
        &["a", "b", "c"],
        vec![("1", v.clone()), ("2", v)],
        vec![Some(0); 3],
        vec![2f64.sqrt(); 3],
    )
}

/// Three agents, each wanting one pair; everything to agent 1 at `(0, 0, 1)`.
pub fn no_equal_prices() -> NamedExample {
    let pair = |mask: u32| ValuationSpec::Explicit(vec![(Bundle::from_mask(mask), 1.0)]);
    build(
        "ex-no-eq",
        &["a", "b", "c"],
        vec![("1", pair(0b011)), ("2", pair(0b110)), ("3", pair(0b101))],
        vec![Some(0); 3],
        vec![0.0, 0.0, 1.0],
    )
}

/// Agent 1 values each item at 1 and the pair at `1 + a`; agent 2 is additive.
/// Both items go to agent 2 at unit prices.
pub fn bounded_complementarity(a: f64) -> NamedExample {
    build(
        "ex-asubmod",
        &["x", "y"],
        vec![
            ("1", ValuationSpec::Symmetric(vec![0.0, 1.0, 1.0 + a])),
            ("2", ValuationSpec::Additive(vec![1.0, 1.0])),
        ],
        vec![Some(1), Some(1)],
        vec![1.0, 1.0],
    )
}

/// Two submodular agents where greedy in order `(a, b)` gives both items to agent 1.
pub fn no_pareto() -> NamedExample {
    let table = |a: f64, b: f64, ab: f64| {
        ValuationSpec::Explicit(vec![
            (Bundle::from_mask(0b01), a),
            (Bundle::from_mask(0b10), b),
            (Bundle::from_mask(0b11), ab),
        ])
    };
    build(
        "ex-no-pareto",
        &["a", "b"],
        vec![("1", table(5.0, 5.0, 7.0)), ("2", table(4.0, 1.0, 5.0))],
        vec![Some(0), Some(0)],
        vec![4.0, 1.0],
    )
}

/// Looks up an example; `param` is `eps` for `ex-smallq` (default 0.04)
/// and `a` for `ex-asubmod` (default 3).
pub fn by_name(name: &str, param: Option<f64>) -> Result<NamedExample> {
    let ex = match name {
        "ex-first" => first(),
        "ex-welfare-pair" => welfare_pair(),
        "ex-smallq" => {
            let eps = param.unwrap_or(0.04);
            if !(eps > 0.0 && eps.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "ex-smallq needs a positive finite eps, got {eps}"
                )));
            }
            small_quality(eps)
        }
        "ex-no-wal" => no_walrasian(),
        "ex-no-eq" => no_equal_prices(),
        "ex-asubmod" => {
            let a = param.unwrap_or(3.0);
            if !(a >= 1.0 && a.is_finite()) {
                return Err(Error::InvalidParameter(format!(
                    "ex-asubmod needs a finite a >= 1, got {a}"
                )));
            }
            bounded_complementarity(a)
        }
        "ex-no-pareto" => no_pareto(),
        other => {
            return Err(Error::InvalidParameter(format!(
                "unknown example '{other}'; expected one of {}",
                NAMES.join(", ")
            )))
        }
    };
    Ok(ex)
}
