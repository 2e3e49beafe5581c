//! Seeded random economies for property checks and sweeps.
//!
//! Values are multiples of 1/4, so sums are exact in binary floating point
//! and ties (several optima, boundary prices) occur often.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bundle::Bundle;
use crate::economy::Economy;
use crate::error::{Error, Result};
use crate::valuation::ValuationSpec;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EconomyClass {
    Additive,
    UnitDemand,
    BudgetedAdditive,
    /// Additive with positive weights plus a monotone bonus: every item has a
    /// positive marginal everywhere, so the submodularity index is finite.
    RandomMonotone,
}

impl EconomyClass {
    pub const ALL: [EconomyClass; 4] = [
        EconomyClass::Additive,
        EconomyClass::UnitDemand,
        EconomyClass::BudgetedAdditive,
        EconomyClass::RandomMonotone,
    ];

    pub fn name(self) -> &'static str {
        match self {
            EconomyClass::Additive => "additive",
            EconomyClass::UnitDemand => "unit-demand",
            EconomyClass::BudgetedAdditive => "budgeted-additive",
            EconomyClass::RandomMonotone => "random-monotone",
        }
    }
}

impl fmt::Display for EconomyClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for EconomyClass {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        EconomyClass::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| {
                Error::InvalidParameter(format!(
                    "unknown economy class '{s}'; expected additive, unit-demand, \
                     budgeted-additive or random-monotone"
                ))
            })
    }
}

fn quarter<R: Rng>(rng: &mut R, lo: u32, hi: u32) -> f64 {
    f64::from(rng.gen_range(lo..=hi)) / 4.0
}

/// A random valuation spec of the given class over `m` items.
pub fn random_spec<R: Rng>(class: EconomyClass, m: usize, rng: &mut R) -> ValuationSpec {
    match class {
        EconomyClass::Additive => {
            ValuationSpec::Additive((0..m).map(|_| quarter(rng, 0, 40)).collect())
        }
        EconomyClass::UnitDemand => {
            ValuationSpec::UnitDemand((0..m).map(|_| quarter(rng, 0, 40)).collect())
        }
        EconomyClass::BudgetedAdditive => {
            let values: Vec<f64> = (0..m).map(|_| quarter(rng, 0, 40)).collect();
            let total: f64 = values.iter().sum();
            let budget = (total * rng.gen_range(0.2..=1.0) * 4.0).round() / 4.0;
            ValuationSpec::BudgetedAdditive { values, budget }
        }
        EconomyClass::RandomMonotone => {
            let weights: Vec<f64> = (0..m).map(|_| quarter(rng, 1, 20)).collect();
            let mut bonus = vec![(Bundle::EMPTY, 0.0)];
            let count = rng.gen_range(1..=(1usize << m).min(8));
            for _ in 0..count {
                let mask = rng.gen_range(1..(1u32 << m));
                bonus.push((Bundle::from_mask(mask), quarter(rng, 0, 40)));
            }
            // monotone closure of the bonus, then add the additive part
            let table: Vec<(Bundle, f64)> = Bundle::all(m)
                .map(|b| {
                    let extra = bonus
                        .iter()
                        .filter(|(s, _)| s.is_subset_of(b))
                        .map(|&(_, v)| v)
                        .fold(0.0f64, f64::max);
                    let base: f64 = b.items().map(|j| weights[j]).sum();
                    (b, base + extra)
                })
                .collect();
            ValuationSpec::Explicit(table)
        }
    }
}

/// A random economy with `n` agents over `m` items.
pub fn random_economy<R: Rng>(
    class: EconomyClass,
    m: usize,
    n: usize,
    rng: &mut R,
) -> Result<Economy> {
    let items: Vec<String> = (0..m).map(|j| format!("i{j}")).collect();
    let agents: Vec<(String, ValuationSpec)> = (0..n)
        .map(|i| (format!("agent{i}"), random_spec(class, m, rng)))
        .collect();
    Economy::from_specs(items, agents)
}

/// [`random_economy`] driven by a ChaCha8 stream seeded with `seed`.
pub fn seeded_economy(class: EconomyClass, m: usize, n: usize, seed: u64) -> Result<Economy> {
    random_economy(class, m, n, &mut ChaCha8Rng::seed_from_u64(seed))
}
