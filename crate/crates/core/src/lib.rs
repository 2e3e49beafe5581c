//! Discrete exchange economies with indivisible items.
//!
//! Valuations are full tables over the `2^m` bundles of an item set with
//! `m ≤ 24`. On top of them the crate provides:
//!
//! * quality measurement for `(r, s)`-local, strong, Walrasian and
//!   quasi-Walrasian equilibria, plus price optimization for a fixed allocation
//!   ([`equilibrium`]);
//! * local search over single-item transfers, supporting prices, greedy
//!   allocation and the exact integral optimum ([`algorithms`]);
//! * the fractional-allocation linear program and its dual, solved by a
//!   self-contained revised simplex ([`lp`]).

// `!(x >= 0.0)` is used on purpose so that NaN is rejected too.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod algorithms;
pub mod bundle;
pub mod catalog;
pub mod economy;
pub mod equilibrium;
pub mod error;
pub mod generate;
pub mod io;
pub mod lp;
pub mod tolerance;
pub mod valuation;

pub use bundle::{Bundle, MAX_ITEMS};
pub use economy::{social_value, Agent, Allocation, Economy, PriceVector};
pub use error::{Error, Result};
pub use valuation::{
    build_valuation, submodularity_index, validate, SubmodularityIndex, Valuation, ValuationSpec,
    Violation,
};
