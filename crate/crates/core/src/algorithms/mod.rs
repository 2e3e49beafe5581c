//! Constructive procedures: local search over single-item transfers,
//! supporting prices, greedy allocation and the exact integral optimum.

mod greedy;
mod local;
mod optimal;

pub use greedy::{greedy_allocate, GreedyTrace};
pub use local::{
    is_local_optimum, local_optimum_search, price_bands, supporting_prices, ImprovementRule, Move,
    SearchOutcome, SearchPolicy, SearchStatus,
};
pub use optimal::optimal_allocation;

use crate::error::{Error, Result};

/// Position `λ ∈ [0, 1]` inside a price interval `[lo, hi]`; 0 picks `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct PriceRule {
    lambda: f64,
}

impl PriceRule {
    pub fn new(lambda: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&lambda) {
            return Err(Error::InvalidParameter(format!(
                "lambda must lie in [0, 1], got {lambda}"
            )));
        }
        Ok(PriceRule { lambda })
    }

    pub fn lambda(self) -> f64 {
        self.lambda
    }
}
