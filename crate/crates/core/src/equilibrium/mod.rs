//! Equilibrium quality: verification of local, strong, Walrasian and
//! quasi-Walrasian conditions, and price optimization for a fixed allocation.

mod quality;
mod search;

use std::fmt;

pub use quality::{
    check_single_improvement, check_single_swap, max_quality, quasi_walrasian_quality,
    verify_local_equilibrium, verify_strong_ir, verify_walrasian,
};
pub use search::{
    local_feasible_at, max_q_for_allocation, max_q_for_allocation_with, max_quasi_q_for_allocation,
    quasi_feasible_at, PriceShape, QualitySearch,
};

use crate::bundle::Bundle;

/// A nonnegative quality parameter that may be unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Quality {
    Finite(f64),
    Infinite,
}

impl Quality {
    pub fn min(self, other: Quality) -> Quality {
        match (self, other) {
            (Quality::Finite(a), Quality::Finite(b)) => Quality::Finite(a.min(b)),
            (Quality::Infinite, q) | (q, Quality::Infinite) => q,
        }
    }

    /// `f64::INFINITY` for the unbounded state.
    pub fn as_f64(self) -> f64 {
        match self {
            Quality::Finite(q) => q,
            Quality::Infinite => f64::INFINITY,
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Quality::Finite(q) => Some(q),
            Quality::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Quality::Infinite)
    }

    /// `self ≥ x`.
    pub fn at_least(self, x: f64) -> bool {
        match self {
            Quality::Finite(q) => q >= x,
            Quality::Infinite => true,
        }
    }
}

impl fmt::Display for Quality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quality::Finite(q) => write!(f, "{q}"),
            Quality::Infinite => write!(f, "infinite"),
        }
    }
}

/// The largest `(r, s)` for which `(f, p)` satisfies individual rationality
/// and outward stability, with the constraints attaining them.
#[derive(Debug, Clone, PartialEq)]
pub struct QualityReport {
    pub r_star: Quality,
    pub s_star: Quality,
    /// Every unallocated item has price 0 (within ε).
    pub unallocated_price_ok: bool,
    pub binding_ir_agent: Option<usize>,
    pub binding_os_witness: Option<(usize, Bundle)>,
}

impl QualityReport {
    /// `q = min(r*, s*)`.
    pub fn q(&self) -> Quality {
        self.r_star.min(self.s_star)
    }

    /// Whether `(f, p)` is an `(r, s)`-local equilibrium.
    pub fn admits(&self, r: f64, s: f64) -> bool {
        self.unallocated_price_ok && self.r_star.at_least(r) && self.s_star.at_least(s)
    }
}

/// One failed condition with its witness.
#[derive(Debug, Clone, PartialEq)]
pub enum Witness {
    /// Unallocated item with a positive price.
    UnallocatedPriced { item: usize, price: f64 },
    /// `v_i(S_i) < r · p(S_i)`.
    IndividualRationality {
        agent: usize,
        value: f64,
        price_total: f64,
    },
    /// `s · v_i(A | S_i) > p(A)` for `A` disjoint from `S_i`.
    OutwardStability {
        agent: usize,
        bundle: Bundle,
        marginal: f64,
        price_total: f64,
    },
    /// `v_i(A | S_i − A) < c · p(A)` for nonempty `A ⊆ S_i`.
    StrongRationality {
        agent: usize,
        bundle: Bundle,
        marginal: f64,
        price_total: f64,
    },
    /// `u_i(D) > u_i(S_i)`.
    NoRegret {
        agent: usize,
        bundle: Bundle,
        held_utility: f64,
        bundle_utility: f64,
    },
    /// `v_i(S_i) − v_i(S_i − j + k) < p_j − p_k`.
    SingleSwap {
        agent: usize,
        give: usize,
        take: usize,
        value_loss: f64,
        price_gap: f64,
    },
    /// `u_i(S_i − j) > u_i(S_i)`.
    SingleDrop {
        agent: usize,
        item: usize,
        value_loss: f64,
        price: f64,
    },
    /// Moving `item` from `from` to `to` raises social value by `gain`.
    Transfer {
        from: usize,
        to: usize,
        item: usize,
        gain: f64,
    },
}

impl Witness {
    /// Short identifier of the failed condition.
    pub fn condition(&self) -> &'static str {
        match self {
            Witness::UnallocatedPriced { .. } => "unallocated-price",
            Witness::IndividualRationality { .. } => "individual-rationality",
            Witness::OutwardStability { .. } => "outward-stability",
            Witness::StrongRationality { .. } => "strong-individual-rationality",
            Witness::NoRegret { .. } => "no-regret",
            Witness::SingleSwap { .. } => "single-swap",
            Witness::SingleDrop { .. } => "single-drop",
            Witness::Transfer { .. } => "single-transfer",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct EquilibriumVerdict {
    pub holds: bool,
    pub violations: Vec<Witness>,
}

impl EquilibriumVerdict {
    pub fn from_violations(violations: Vec<Witness>) -> Self {
        EquilibriumVerdict {
            holds: violations.is_empty(),
            violations,
        }
    }
}
