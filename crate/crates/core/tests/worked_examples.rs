//! Worked examples for every operation, with expected values either quoted
//! from the source model or recomputed here by direct enumeration.

mod common;

use exchange_lab::algorithms::{
    greedy_allocate, is_local_optimum, local_optimum_search, optimal_allocation, supporting_prices,
    PriceRule, SearchPolicy,
};
use exchange_lab::bundle::Bundle;
use exchange_lab::catalog;
use exchange_lab::economy::{social_value, Allocation, Economy, PriceVector};
use exchange_lab::equilibrium::{
    check_single_swap, local_feasible_at, max_q_for_allocation, max_q_for_allocation_with,
    max_quality, max_quasi_q_for_allocation, quasi_walrasian_quality, verify_local_equilibrium,
    verify_strong_ir, verify_walrasian, PriceShape, Quality,
};
use exchange_lab::lp::{
    dual_prices, fractional_optimum, solve_feasibility, LpProblem, RowKind, Sense,
};
use exchange_lab::valuation::{build_valuation, validate, SubmodularityIndex, ValuationSpec};

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol
}

#[test]
fn marginal_values() {
    let v = &catalog::no_walrasian().economy.valuation(0).clone();
    let a = Bundle::singleton(0);
    let b = Bundle::singleton(1);
    assert_eq!(v.marginal_value(b, a).unwrap(), 3.0);
    assert_eq!(v.marginal_value(Bundle::EMPTY, a.union(b)).unwrap(), 0.0);
    assert!(v.marginal_value(a, a.union(b)).is_err());
    let v1 = catalog::no_pareto().economy.valuation(0).clone();
    assert_eq!(v1.marginal_value(a, b).unwrap(), 2.0);
}

#[test]
fn social_values() {
    let e = catalog::no_walrasian().economy;
    assert_eq!(social_value(&e, &Allocation::all_to(3, 0)).unwrap(), 4.0);
    assert_eq!(social_value(&e, &Allocation::unallocated(3)).unwrap(), 0.0);
    let ex = catalog::first();
    // a → 2 is worth v_2(a) = 3, b → 1 is worth v_1(b) = 3
    let expected = ex.economy.valuation(1).table()[0b01] + ex.economy.valuation(0).table()[0b10];
    assert_eq!(expected, 6.0);
    assert_eq!(social_value(&ex.economy, &ex.allocation).unwrap(), expected);
    assert!(social_value(&e, &Allocation::all_to(2, 0)).is_err());
}

#[test]
fn submodularity_indices() {
    let sym = catalog::no_walrasian().economy.valuation(0).clone();
    assert_eq!(common::index_by_definition(&sym), None);
    assert_eq!(sym.submodularity_index(), SubmodularityIndex::Infinite);
    let add = build_valuation(3, &ValuationSpec::Additive(vec![1.0, 2.0, 0.0])).unwrap();
    assert_eq!(add.submodularity_index(), SubmodularityIndex::Finite(1.0));
    let agent1 = catalog::bounded_complementarity(3.0)
        .economy
        .valuation(0)
        .clone();
    assert_eq!(agent1.value(Bundle::full(2)), 4.0);
    assert_eq!(
        agent1.submodularity_index(),
        SubmodularityIndex::Finite(3.0)
    );
}

#[test]
fn validation_and_constructors() {
    let mut table = vec![0.0; 4];
    table[0] = 1.0;
    table[1] = 1.0;
    table[2] = 1.0;
    table[3] = 1.0;
    assert_eq!(validate(2, &table).len(), 1);
    let bad = vec![0.0, 5.0, 0.0, 4.0];
    assert_eq!(validate(2, &bad).len(), 1);
    for name in catalog::NAMES {
        let ex = catalog::by_name(name, None).unwrap();
        for i in 0..ex.economy.num_agents() {
            let v = ex.economy.valuation(i);
            assert!(validate(v.num_items(), v.table()).is_empty(), "{name}");
        }
    }

    let sym = build_valuation(3, &ValuationSpec::Symmetric(vec![0.0, 0.0, 3.0, 4.0])).unwrap();
    assert_eq!(&sym, catalog::no_walrasian().economy.valuation(0));
    let add = build_valuation(2, &ValuationSpec::Additive(vec![1.0, 1.0])).unwrap();
    assert_eq!(
        &add,
        catalog::bounded_complementarity(3.0).economy.valuation(1)
    );
    let partial = build_valuation(
        3,
        &ValuationSpec::Explicit(vec![(Bundle::from_mask(0b011), 1.0)]),
    )
    .unwrap();
    for mask in 0..8u32 {
        let expected = if mask & 0b011 == 0b011 { 1.0 } else { 0.0 };
        assert_eq!(partial.value(Bundle::from_mask(mask)), expected);
    }
}

#[test]
fn max_quality_examples() {
    let ex = catalog::no_walrasian();
    let rep = max_quality(&ex.economy, &ex.allocation, &ex.prices).unwrap();
    let target = 2.0 * 2f64.sqrt() / 3.0;
    assert!(close(rep.r_star.as_f64(), target, 1e-12));
    assert!(close(rep.s_star.as_f64(), target, 1e-12));

    let ex = catalog::first();
    let half = PriceVector::uniform(2, 0.5).unwrap();
    let rep = max_quality(&ex.economy, &ex.allocation, &half).unwrap();
    assert!(close(rep.q().as_f64(), 0.5, 1e-12));

    let ex = catalog::small_quality(0.04);
    let rep = max_quality(&ex.economy, &ex.allocation, &ex.prices).unwrap();
    assert!(close(rep.r_star.as_f64(), 0.2, 1e-9));
    assert!(close(rep.s_star.as_f64(), 0.2, 1e-9));

    let ex = catalog::bounded_complementarity(3.0);
    let rep = max_quality(&ex.economy, &ex.allocation, &ex.prices).unwrap();
    assert!(close(rep.r_star.as_f64(), 1.0, 1e-12));
    assert!(close(rep.s_star.as_f64(), 0.5, 1e-12));
}

#[test]
fn local_equilibrium_verification() {
    let ex = catalog::first();
    assert!(
        verify_local_equilibrium(&ex.economy, &ex.allocation, &ex.prices, 1.0, 1.0)
            .unwrap()
            .holds
    );
    let e = catalog::no_walrasian();
    let v = verify_local_equilibrium(&e.economy, &e.allocation, &e.prices, 1.0, 1.0).unwrap();
    assert!(!v.holds);
    assert!(v
        .violations
        .iter()
        .any(|w| w.condition() == "outward-stability"));
    let f = Allocation::new(vec![Some(0), None, Some(1)]);
    let p = PriceVector::new(vec![9.0, 0.0, 9.0]).unwrap();
    assert!(
        verify_local_equilibrium(&e.economy, &f, &p, 0.0, 0.0)
            .unwrap()
            .holds
    );
}

#[test]
fn strong_individual_rationality() {
    let ex = catalog::no_pareto();
    let v = verify_strong_ir(&ex.economy, &ex.allocation, &ex.prices, 1.0).unwrap();
    assert!(!v.holds);
    assert!(
        verify_strong_ir(&ex.economy, &ex.allocation, &ex.prices, 0.0)
            .unwrap()
            .holds
    );
    // the local optimum a → 2, b → 1 with band prices
    let f = Allocation::total(&[1, 0]);
    assert!(is_local_optimum(&ex.economy, &f).unwrap().holds);
    for lambda in [0.0, 0.3, 1.0] {
        let p = supporting_prices(&ex.economy, &f, PriceRule::new(lambda).unwrap()).unwrap();
        assert!(verify_strong_ir(&ex.economy, &f, &p, 1.0).unwrap().holds);
    }
}

#[test]
fn walrasian_and_swaps() {
    let ex = catalog::welfare_pair();
    assert!(
        verify_walrasian(&ex.economy, &ex.allocation, &ex.prices)
            .unwrap()
            .holds
    );
    assert!(
        check_single_swap(&ex.economy, &ex.allocation, &ex.prices)
            .unwrap()
            .holds
    );
    let f = Allocation::total(&[1, 0]);
    let ones = PriceVector::uniform(2, 1.0).unwrap();
    assert!(!verify_walrasian(&ex.economy, &f, &ones).unwrap().holds);

    let ex = catalog::first();
    let v = check_single_swap(&ex.economy, &ex.allocation, &ex.prices).unwrap();
    assert!(!v.holds);
    assert!(v.violations.iter().any(|w| matches!(
        w,
        exchange_lab::equilibrium::Witness::SingleSwap {
            agent: 1,
            give: 0,
            take: 1,
            ..
        }
    )));
}

#[test]
fn max_q_examples() {
    let ex = catalog::no_walrasian();
    let res = max_q_for_allocation(&ex.economy, &ex.allocation).unwrap();
    assert!(close(res.q_star.as_f64(), 0.942809, 1e-6));
    let oracle = common::parametric_max_q(&ex.economy, &ex.allocation).unwrap();
    assert!(close(res.q_star.as_f64(), oracle, 1e-6));

    let ex = catalog::no_equal_prices();
    let res = max_q_for_allocation(&ex.economy, &ex.allocation).unwrap();
    assert!(close(res.q_star.as_f64(), 1.0, 1e-6));
    for (got, want) in res.prices.as_slice().iter().zip([0.0, 0.0, 1.0]) {
        assert!(close(*got, want, 1e-6));
    }
    let zero = max_q_for_allocation(&ex.economy, &Allocation::total(&[1, 2, 0])).unwrap();
    assert!(zero.q_star.as_f64() <= 1e-6);
    let uni = max_q_for_allocation_with(&ex.economy, &ex.allocation, PriceShape::Uniform).unwrap();
    assert!(close(uni.q_star.as_f64(), (2.0f64 / 3.0).sqrt(), 1e-6));
}

#[test]
fn quasi_walrasian_examples() {
    let ex = catalog::first();
    let q0 = quasi_walrasian_quality(&ex.economy, &ex.allocation, &PriceVector::zeros(2)).unwrap();
    // min over agents of v_i(S_i) / max_A v_i(A)
    let direct = (0..2)
        .map(|i| {
            let v = ex.economy.valuation(i);
            v.value(ex.allocation.bundle_of(i)) / v.table().iter().cloned().fold(0.0, f64::max)
        })
        .fold(1.0f64, f64::min);
    assert!(close(q0, direct, 1e-12));
    let ex2 = catalog::welfare_pair();
    assert_eq!(
        quasi_walrasian_quality(&ex2.economy, &ex2.allocation, &ex2.prices).unwrap(),
        1.0
    );
    assert!(close(
        quasi_walrasian_quality(&ex.economy, &ex.allocation, &ex.prices).unwrap(),
        0.5,
        1e-12
    ));

    for f in [
        Allocation::all_to(3, 0),
        Allocation::total(&[0, 1, 0]),
        Allocation::unallocated(3),
    ] {
        let (q, _) = max_quasi_q_for_allocation(&catalog::no_walrasian().economy, &f).unwrap();
        assert!(q <= 1e-6);
    }
    let (q, _) = max_quasi_q_for_allocation(&ex2.economy, &ex2.allocation).unwrap();
    assert_eq!(q, 1.0);
}

/// A quasi-Walrasian quality below one does not bound outward stability: the
/// holder of `a` with `v(a) = 1`, `v(ab) = 3` at zero prices has quasi quality
/// `1/3` yet any `s > 0` fails on the free item `b`.
#[test]
fn quasi_quality_below_one_leaves_outward_stability_open() {
    let v = exchange_lab::Valuation::from_table(2, vec![0.0, 1.0, 0.0, 3.0]).unwrap();
    let e = Economy::from_valuations(vec![v]).unwrap();
    let f = Allocation::new(vec![Some(0), None]);
    let p = PriceVector::zeros(2);
    let q = quasi_walrasian_quality(&e, &f, &p).unwrap();
    assert!(close(q, 1.0 / 3.0, 1e-12));
    let rep = max_quality(&e, &f, &p).unwrap();
    assert!(rep.r_star.at_least(q));
    assert_eq!(rep.s_star, Quality::Finite(0.0));
    assert!(!verify_local_equilibrium(&e, &f, &p, q, q).unwrap().holds);
}

#[test]
fn local_optimum_examples() {
    let ex = catalog::no_equal_prices();
    assert!(
        is_local_optimum(&ex.economy, &Allocation::total(&[1, 2, 0]))
            .unwrap()
            .holds
    );
    let (g, _) = optimal_allocation(&ex.economy);
    assert!(is_local_optimum(&ex.economy, &g).unwrap().holds);
    let ex = catalog::no_pareto();
    let v = is_local_optimum(&ex.economy, &ex.allocation).unwrap();
    assert!(!v.holds);

    let ex = catalog::no_walrasian();
    let out = local_optimum_search(
        &ex.economy,
        &Allocation::total(&[0, 1, 1]),
        &SearchPolicy::default(),
    )
    .unwrap();
    assert_eq!(social_value(&ex.economy, &out.allocation).unwrap(), 4.0);
    let owners: Vec<_> = out.allocation.assignment().to_vec();
    assert!(owners.iter().all(|o| *o == owners[0]));

    let ex = catalog::bounded_complementarity(3.0);
    let f0 = Allocation::all_to(2, 0);
    let out = local_optimum_search(&ex.economy, &f0, &SearchPolicy::default()).unwrap();
    assert_eq!(out.allocation, f0);
    assert_eq!(social_value(&ex.economy, &f0).unwrap(), 4.0);
}

#[test]
fn supporting_price_examples() {
    let ex = catalog::no_walrasian();
    let p0 = supporting_prices(&ex.economy, &ex.allocation, PriceRule::new(0.0).unwrap()).unwrap();
    assert_eq!(p0.as_slice(), &[0.0; 3]);
    let p1 = supporting_prices(&ex.economy, &ex.allocation, PriceRule::new(1.0).unwrap()).unwrap();
    assert_eq!(p1.as_slice(), &[1.0; 3]);
    let single = Economy::from_specs(
        vec!["a", "b"],
        vec![("solo", ValuationSpec::UnitDemand(vec![3.0, 2.0]))],
    )
    .unwrap();
    let f = Allocation::all_to(2, 0);
    let p = supporting_prices(&single, &f, PriceRule::new(0.5).unwrap()).unwrap();
    // hi_a = v(ab) − v(b) = 1, hi_b = v(ab) − v(a) = 0
    assert_eq!(p.as_slice(), &[0.5, 0.0]);
    let ex = catalog::welfare_pair();
    let p = supporting_prices(&ex.economy, &ex.allocation, PriceRule::new(1.0).unwrap()).unwrap();
    assert_eq!(p.as_slice(), &[2.0, 2.0]);
}

#[test]
fn greedy_examples() {
    let ex = catalog::no_pareto();
    let (f, p, _) = greedy_allocate(&ex.economy, &[0, 1], PriceRule::default()).unwrap();
    assert_eq!(f, Allocation::all_to(2, 0));
    assert_eq!(p.as_slice(), &[4.0, 1.0]);
    let ex = catalog::bounded_complementarity(3.0);
    let (f, p, _) = greedy_allocate(&ex.economy, &[0, 1], PriceRule::default()).unwrap();
    assert_eq!(f, Allocation::all_to(2, 0));
    assert_eq!(p.as_slice(), &[1.0, 1.0]);
}

#[test]
fn optimal_allocation_examples() {
    assert_eq!(optimal_allocation(&catalog::no_walrasian().economy).1, 4.0);
    assert_eq!(
        optimal_allocation(&catalog::no_equal_prices().economy).1,
        1.0
    );
    for name in catalog::NAMES {
        let e = catalog::by_name(name, None).unwrap().economy;
        let (f, m) = optimal_allocation(&e);
        assert!(close(m, common::brute_force_optimum(&e), 1e-12), "{name}");
        assert!(close(social_value(&e, &f).unwrap(), m, 1e-12));
    }
}

#[test]
fn fractional_examples() {
    let e = catalog::no_walrasian().economy;
    let (mf, dual) = common::certified_fractional(&e);
    assert!(close(mf, 4.5, 1e-9) && close(dual, 4.5, 1e-9));
    let d = dual_prices(&e).unwrap();
    for &p in d.item_prices.as_slice() {
        assert!(close(p, 1.5, 1e-9));
    }
    assert!(d.agent_utilities.iter().all(|&u| close(u, 0.0, 1e-9)));
    let (mf, _) = common::certified_fractional(&catalog::no_equal_prices().economy);
    assert!(close(mf, 1.5, 1e-9));
    let solo = Economy::from_specs(
        vec!["a", "b"],
        vec![(
            "solo",
            ValuationSpec::Explicit(vec![(Bundle::full(2), 1.0)]),
        )],
    )
    .unwrap();
    let (_, mf) = fractional_optimum(&solo).unwrap();
    assert!(close(mf, 1.0, 1e-9));
    assert!(close(dual_prices(&solo).unwrap().objective(), 1.0, 1e-9));
}

/// The system `q p(X) ≤ 4`, `p(A) ≥ 3q` on pairs, `p(X) ≥ 4q`, written out by hand.
fn no_walrasian_system(q: f64) -> LpProblem {
    let mut lp = LpProblem::new(Sense::Minimize);
    let p = lp.add_variables(3, 0.0);
    let (a, b, c) = (p.start, p.start + 1, p.start + 2);
    lp.add_row(RowKind::Le, 4.0, &[(a, q), (b, q), (c, q)])
        .unwrap();
    lp.add_row(RowKind::Ge, 4.0 * q, &[(a, 1.0), (b, 1.0), (c, 1.0)])
        .unwrap();
    for (x, y) in [(a, b), (b, c), (a, c)] {
        lp.add_row(RowKind::Ge, 3.0 * q, &[(x, 1.0), (y, 1.0)])
            .unwrap();
    }
    lp
}

#[test]
fn feasibility_examples() {
    assert!(solve_feasibility(&no_walrasian_system(0.9))
        .unwrap()
        .is_feasible());
    assert!(!solve_feasibility(&no_walrasian_system(0.95))
        .unwrap()
        .is_feasible());
    assert!(solve_feasibility(&LpProblem::new(Sense::Minimize))
        .unwrap()
        .is_feasible());
    // the library's own system agrees
    let ex = catalog::no_walrasian();
    assert!(
        local_feasible_at(&ex.economy, &ex.allocation, 0.9, PriceShape::Free)
            .unwrap()
            .is_some()
    );
    assert!(
        local_feasible_at(&ex.economy, &ex.allocation, 0.95, PriceShape::Free)
            .unwrap()
            .is_none()
    );
}

#[test]
fn infinite_states_are_explicit() {
    let ex = catalog::first();
    let rep = max_quality(&ex.economy, &ex.allocation, &PriceVector::zeros(2)).unwrap();
    assert_eq!(rep.r_star, Quality::Infinite);
    assert_eq!(rep.s_star, Quality::Finite(0.0));
}
