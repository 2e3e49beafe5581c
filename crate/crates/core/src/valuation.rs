//! Valuations over bundles: construction, validation, marginal values and the
//! submodularity index.

use std::fmt;

use crate::bundle::{Bundle, MAX_ITEMS};
use crate::error::{Error, Result};
use crate::tolerance::eps;

/// A failed normalization or free-disposal check, with its witness.
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    /// `v(∅) != 0`.
    Normalization { value: f64 },
    /// `smaller ⊆ larger` but `v(smaller) > v(larger)`.
    FreeDisposal {
        smaller: Bundle,
        larger: Bundle,
        smaller_value: f64,
        larger_value: f64,
    },
    /// NaN or infinite entry.
    NonFinite { bundle: Bundle },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Normalization { value } => write!(f, "v(∅) = {value}, expected 0"),
            Violation::FreeDisposal {
                smaller,
                larger,
                smaller_value,
                larger_value,
            } => write!(
                f,
                "free disposal: v({smaller}) = {smaller_value} > v({larger}) = {larger_value}"
            ),
            Violation::NonFinite { bundle } => write!(f, "v({bundle}) is not finite"),
        }
    }
}

/// Checks normalization and free disposal of a full table of `2^m` values.
///
/// Monotonicity is checked on covering pairs `S ⊂ S ∪ {x}`, which is
/// equivalent to checking every pair `A ⊆ B`.
pub fn validate(num_items: usize, values: &[f64]) -> Vec<Violation> {
    let tol = eps();
    let mut out = Vec::new();
    debug_assert_eq!(values.len(), 1 << num_items);
    for (mask, v) in values.iter().enumerate() {
        if !v.is_finite() {
            out.push(Violation::NonFinite {
                bundle: Bundle::from_mask(mask as u32),
            });
        }
    }
    if !out.is_empty() {
        return out;
    }
    if values[0].abs() > tol {
        out.push(Violation::Normalization { value: values[0] });
    }
    for mask in 0..values.len() {
        let smaller = Bundle::from_mask(mask as u32);
        for x in 0..num_items {
            if smaller.contains(x) {
                continue;
            }
            let larger = smaller.with(x);
            let (sv, lv) = (values[smaller.index()], values[larger.index()]);
            if sv > lv + tol {
                out.push(Violation::FreeDisposal {
                    smaller,
                    larger,
                    smaller_value: sv,
                    larger_value: lv,
                });
            }
        }
    }
    out
}

/// A normalized, monotone value table over all `2^m` bundles.
#[derive(Debug, Clone, PartialEq)]
pub struct Valuation {
    num_items: usize,
    values: Vec<f64>,
}

impl Valuation {
    /// Builds a valuation from a full table indexed by bundle mask.
    pub fn from_table(num_items: usize, values: Vec<f64>) -> Result<Self> {
        if num_items > MAX_ITEMS {
            return Err(Error::TooManyItems {
                got: num_items,
                limit: MAX_ITEMS,
            });
        }
        if values.len() != 1 << num_items {
            return Err(Error::Dimension(format!(
                "table has {} entries, expected 2^{} = {}",
                values.len(),
                num_items,
                1usize << num_items
            )));
        }
        let violations = validate(num_items, &values);
        if !violations.is_empty() {
            return Err(Error::InvalidValuation(violations));
        }
        Ok(Valuation { num_items, values })
    }

    /// The identically-zero valuation.
    pub fn zero(num_items: usize) -> Self {
        Valuation {
            num_items,
            values: vec![0.0; 1 << num_items],
        }
    }

    pub fn num_items(&self) -> usize {
        self.num_items
    }

    pub fn table(&self) -> &[f64] {
        &self.values
    }

    #[inline]
    pub fn value(&self, bundle: Bundle) -> f64 {
        self.values[bundle.index()]
    }

    /// `v(A | S) = v(A ∪ S) - v(S)`. Callers guarantee `A ∩ S = ∅`.
    #[inline]
    pub fn marginal(&self, increment: Bundle, base: Bundle) -> f64 {
        self.values[increment.union(base).index()] - self.values[base.index()]
    }

    /// `v(j | S)` for a single item.
    #[inline]
    pub fn item_marginal(&self, item: usize, base: Bundle) -> f64 {
        self.values[base.with(item).index()] - self.values[base.index()]
    }

    /// Checked marginal value: rejects overlapping `increment` and `base`.
    pub fn marginal_value(&self, increment: Bundle, base: Bundle) -> Result<f64> {
        let overlap = increment.intersection(base);
        if !overlap.is_empty() {
            return Err(Error::Overlap(overlap.items().collect()));
        }
        let full = Bundle::full(self.num_items);
        if !increment.union(base).is_subset_of(full) {
            let index = increment
                .union(base)
                .difference(full)
                .items()
                .next()
                .unwrap_or(0);
            return Err(Error::ItemOutOfRange {
                index,
                num_items: self.num_items,
            });
        }
        Ok(self.marginal(increment, base))
    }

    pub fn submodularity_index(&self) -> SubmodularityIndex {
        submodularity_index(self)
    }
}

/// How a valuation is described before being expanded into a table.
#[derive(Debug, Clone, PartialEq)]
pub enum ValuationSpec {
    /// Possibly partial table; unspecified bundles get the monotone closure
    /// `max { v(A) : A ⊆ B specified }`, or 0.
    Explicit(Vec<(Bundle, f64)>),
    /// `v(B) = Σ_{j∈B} w_j`.
    Additive(Vec<f64>),
    /// `v(B) = max_{j∈B} w_j`.
    UnitDemand(Vec<f64>),
    /// `v(B) = by_size[|B|]`, with `by_size.len() == m + 1`.
    Symmetric(Vec<f64>),
    /// `v(B) = min(budget, Σ_{j∈B} w_j)`.
    BudgetedAdditive { values: Vec<f64>, budget: f64 },
}

fn check_weights(kind: &str, weights: &[f64], num_items: usize) -> Result<()> {
    if weights.len() != num_items {
        return Err(Error::Dimension(format!(
            "{kind} valuation has {} weights for {num_items} items",
            weights.len()
        )));
    }
    Ok(())
}

fn negative_weights(weights: &[f64]) -> Vec<Violation> {
    weights
        .iter()
        .enumerate()
        .filter(|(_, w)| !w.is_finite() || **w < 0.0)
        .map(|(j, w)| {
            if w.is_finite() {
                Violation::FreeDisposal {
                    smaller: Bundle::EMPTY,
                    larger: Bundle::singleton(j),
                    smaller_value: 0.0,
                    larger_value: *w,
                }
            } else {
                Violation::NonFinite {
                    bundle: Bundle::singleton(j),
                }
            }
        })
        .collect()
}

/// Expands a [`ValuationSpec`] into a validated table.
pub fn build_valuation(num_items: usize, spec: &ValuationSpec) -> Result<Valuation> {
    if num_items > MAX_ITEMS {
        return Err(Error::TooManyItems {
            got: num_items,
            limit: MAX_ITEMS,
        });
    }
    let size = 1usize << num_items;
    let values: Vec<f64> = match spec {
        ValuationSpec::Explicit(entries) => explicit_closure(num_items, entries)?,
        ValuationSpec::Additive(w) => {
            check_weights("additive", w, num_items)?;
            let bad = negative_weights(w);
            if !bad.is_empty() {
                return Err(Error::InvalidValuation(bad));
            }
            (0..size)
                .map(|m| Bundle::from_mask(m as u32).items().map(|j| w[j]).sum())
                .collect()
        }
        ValuationSpec::UnitDemand(w) => {
            check_weights("unit-demand", w, num_items)?;
            let bad = negative_weights(w);
            if !bad.is_empty() {
                return Err(Error::InvalidValuation(bad));
            }
            (0..size)
                .map(|m| {
                    Bundle::from_mask(m as u32)
                        .items()
                        .map(|j| w[j])
                        .fold(0.0, f64::max)
                })
                .collect()
        }
        ValuationSpec::Symmetric(by_size) => {
            if by_size.len() != num_items + 1 {
                return Err(Error::Dimension(format!(
                    "symmetric valuation needs {} values (sizes 0..={num_items}), got {}",
                    num_items + 1,
                    by_size.len()
                )));
            }
            (0..size)
                .map(|m| by_size[(m as u32).count_ones() as usize])
                .collect()
        }
        ValuationSpec::BudgetedAdditive { values, budget } => {
            check_weights("budgeted-additive", values, num_items)?;
            let mut bad = negative_weights(values);
            if !budget.is_finite() || *budget < 0.0 {
                bad.push(Violation::FreeDisposal {
                    smaller: Bundle::EMPTY,
                    larger: Bundle::full(num_items),
                    smaller_value: 0.0,
                    larger_value: *budget,
                });
            }
            if !bad.is_empty() {
                return Err(Error::InvalidValuation(bad));
            }
            (0..size)
                .map(|m| {
                    let sum: f64 = Bundle::from_mask(m as u32).items().map(|j| values[j]).sum();
                    sum.min(*budget)
                })
                .collect()
        }
    };
    Valuation::from_table(num_items, values)
}

fn explicit_closure(num_items: usize, entries: &[(Bundle, f64)]) -> Result<Vec<f64>> {
    let full = Bundle::full(num_items);
    let size = 1usize << num_items;
    let mut specified: Vec<Option<f64>> = vec![None; size];
    let mut bad = Vec::new();
    for &(bundle, value) in entries {
        if !bundle.is_subset_of(full) {
            return Err(Error::ItemOutOfRange {
                index: bundle.difference(full).items().next().unwrap_or(0),
                num_items,
            });
        }
        if !value.is_finite() {
            bad.push(Violation::NonFinite { bundle });
            continue;
        }
        match specified[bundle.index()] {
            Some(prev) if (prev - value).abs() > eps() => {
                return Err(Error::Schema(format!(
                    "bundle {bundle} specified twice with values {prev} and {value}"
                )))
            }
            _ => specified[bundle.index()] = Some(value),
        }
    }
    if let Some(v0) = specified[0] {
        if v0.abs() > eps() {
            bad.push(Violation::Normalization { value: v0 });
        }
    }
    // Free disposal between specified entries.
    let given: Vec<(Bundle, f64)> = specified
        .iter()
        .enumerate()
        .filter_map(|(m, v)| v.map(|v| (Bundle::from_mask(m as u32), v)))
        .collect();
    for &(a, va) in &given {
        for &(b, vb) in &given {
            if a != b && a.is_subset_of(b) && va > vb + eps() {
                bad.push(Violation::FreeDisposal {
                    smaller: a,
                    larger: b,
                    smaller_value: va,
                    larger_value: vb,
                });
            }
        }
    }
    if !bad.is_empty() {
        return Err(Error::InvalidValuation(bad));
    }
    // Monotone closure in mask order: every proper subset of B has a smaller mask.
    let mut values = vec![0.0; size];
    for mask in 1..size {
        let b = Bundle::from_mask(mask as u32);
        let mut best = specified[mask].unwrap_or(0.0);
        for x in b.items() {
            best = best.max(values[b.without(x).index()]);
        }
        values[mask] = best;
    }
    values[0] = 0.0;
    Ok(values)
}

/// The least `a ≥ 1` for which a valuation is `a`-submodular, if any.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SubmodularityIndex {
    Finite(f64),
    Infinite,
}

impl SubmodularityIndex {
    pub fn is_finite(self) -> bool {
        matches!(self, SubmodularityIndex::Finite(_))
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            SubmodularityIndex::Finite(a) => Some(a),
            SubmodularityIndex::Infinite => None,
        }
    }

    /// The larger of two indices; `Infinite` dominates.
    pub fn max(self, other: SubmodularityIndex) -> SubmodularityIndex {
        match (self, other) {
            (SubmodularityIndex::Finite(a), SubmodularityIndex::Finite(b)) => {
                SubmodularityIndex::Finite(a.max(b))
            }
            _ => SubmodularityIndex::Infinite,
        }
    }
}

impl fmt::Display for SubmodularityIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SubmodularityIndex::Finite(a) => write!(f, "{a}"),
            SubmodularityIndex::Infinite => write!(f, "infinite"),
        }
    }
}

/// Exhaustive computation of the submodularity index.
///
/// `v_W(A ∪ {x}) - v_W(A) = v(x | W ∪ A)` and `v_W(x) = v(x | W)`, so the
/// index is the largest ratio `v(x | B) / v(x | W)` over `W ⊆ B`, `x ∉ B`.
/// A witness with `v(x | W) ≤ ε < v(x | B)` makes the index infinite.
pub fn submodularity_index(v: &Valuation) -> SubmodularityIndex {
    let tol = eps();
    let m = v.num_items();
    let mut best = 1.0f64;
    for b in Bundle::all(m) {
        for x in 0..m {
            if b.contains(x) {
                continue;
            }
            let upper = v.item_marginal(x, b);
            if upper <= tol {
                continue;
            }
            for w in b.subsets() {
                let lower = v.item_marginal(x, w);
                if lower <= tol {
                    return SubmodularityIndex::Infinite;
                }
                let ratio = upper / lower;
                if ratio > best {
                    best = ratio;
                }
            }
        }
    }
    SubmodularityIndex::Finite(best)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn b(items: &[usize]) -> Bundle {
        items.iter().copied().collect()
    }

    fn symmetric_034() -> Valuation {
        build_valuation(3, &ValuationSpec::Symmetric(vec![0.0, 0.0, 3.0, 4.0])).unwrap()
    }

    #[test]
    fn marginal_on_symmetric_example() {
        let v = symmetric_034();
        assert_eq!(v.marginal_value(b(&[1]), b(&[0])).unwrap(), 3.0);
        assert_eq!(v.marginal_value(Bundle::EMPTY, b(&[0, 2])).unwrap(), 0.0);
    }

    #[test]
    fn marginal_rejects_overlap() {
        let v = symmetric_034();
        match v.marginal_value(b(&[0, 1]), b(&[1, 2])) {
            Err(Error::Overlap(items)) => assert_eq!(items, vec![1]),
            other => panic!("expected overlap error, got {other:?}"),
        }
    }

    #[test]
    fn marginal_in_greedy_example() {
        let v1 = build_valuation(
            2,
            &ValuationSpec::Explicit(vec![(b(&[0]), 5.0), (b(&[1]), 5.0), (b(&[0, 1]), 7.0)]),
        )
        .unwrap();
        assert_eq!(v1.marginal_value(b(&[0]), b(&[1])).unwrap(), 2.0);
    }

    #[test]
    fn validate_reports_normalization() {
        let bad = validate(1, &[1.0, 2.0]);
        assert_eq!(bad, vec![Violation::Normalization { value: 1.0 }]);
    }

    #[test]
    fn validate_reports_free_disposal_pair() {
        // v(a) = 5, v(b) = 0, v(ab) = 4
        let bad = validate(2, &[0.0, 5.0, 0.0, 4.0]);
        assert_eq!(
            bad,
            vec![Violation::FreeDisposal {
                smaller: b(&[0]),
                larger: b(&[0, 1]),
                smaller_value: 5.0,
                larger_value: 4.0,
            }]
        );
        assert!(Valuation::from_table(2, vec![0.0, 5.0, 0.0, 4.0]).is_err());
    }

    #[test]
    fn partial_explicit_table_gets_monotone_closure() {
        let v = build_valuation(3, &ValuationSpec::Explicit(vec![(b(&[0, 1]), 1.0)])).unwrap();
        for mask in 0..8u32 {
            let expected = if mask & 0b011 == 0b011 { 1.0 } else { 0.0 };
            assert_eq!(v.value(Bundle::from_mask(mask)), expected, "mask {mask:b}");
        }
    }

    #[test]
    fn explicit_spec_with_disposal_violation_is_rejected() {
        let spec = ValuationSpec::Explicit(vec![(b(&[0]), 5.0), (b(&[0, 1]), 4.0)]);
        match build_valuation(2, &spec) {
            Err(Error::InvalidValuation(v)) => assert_eq!(v.len(), 1),
            other => panic!("expected invalid valuation, got {other:?}"),
        }
        let spec = ValuationSpec::Explicit(vec![(Bundle::EMPTY, 1.0)]);
        assert!(matches!(
            build_valuation(2, &spec),
            Err(Error::InvalidValuation(_))
        ));
    }

    #[test]
    fn constructors() {
        let add = build_valuation(2, &ValuationSpec::Additive(vec![1.0, 1.0])).unwrap();
        assert_eq!(add.table(), &[0.0, 1.0, 1.0, 2.0]);
        let unit = build_valuation(2, &ValuationSpec::UnitDemand(vec![4.0, 3.0])).unwrap();
        assert_eq!(unit.table(), &[0.0, 4.0, 3.0, 4.0]);
        let budget = build_valuation(
            2,
            &ValuationSpec::BudgetedAdditive {
                values: vec![2.0, 1.0],
                budget: 2.0,
            },
        )
        .unwrap();
        assert_eq!(budget.table(), &[0.0, 2.0, 1.0, 2.0]);
        assert!(build_valuation(2, &ValuationSpec::Additive(vec![1.0])).is_err());
        assert!(build_valuation(2, &ValuationSpec::Additive(vec![1.0, -1.0])).is_err());
        assert!(build_valuation(2, &ValuationSpec::Symmetric(vec![0.0, 2.0, 1.0])).is_err());
    }

    #[test]
    fn index_of_symmetric_example_is_infinite() {
        assert_eq!(
            symmetric_034().submodularity_index(),
            SubmodularityIndex::Infinite
        );
    }

    #[test]
    fn index_of_additive_is_one() {
        let v = build_valuation(4, &ValuationSpec::Additive(vec![1.0, 2.0, 0.5, 3.0])).unwrap();
        assert_eq!(v.submodularity_index(), SubmodularityIndex::Finite(1.0));
    }

    #[test]
    fn index_of_complementary_pair() {
        // each item 1, pair 1 + a
        for a in [1.0, 2.0, 3.0, 5.0] {
            let v = build_valuation(2, &ValuationSpec::Symmetric(vec![0.0, 1.0, 1.0 + a])).unwrap();
            assert_eq!(v.submodularity_index(), SubmodularityIndex::Finite(a));
        }
    }

    #[test]
    fn index_is_clamped_to_one() {
        let v = build_valuation(2, &ValuationSpec::UnitDemand(vec![2.0, 1.0])).unwrap();
        assert_eq!(v.submodularity_index(), SubmodularityIndex::Finite(1.0));
    }
}
