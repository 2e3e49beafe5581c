//! Independent oracles shared by the integration tests. None of them call the
//! routine they are used to check.

#![allow(dead_code)]

use exchange_lab::bundle::Bundle;
use exchange_lab::economy::{social_value, Allocation, Economy, PriceVector};
use exchange_lab::lp::{
    dual_prices, fractional_optimum, solve, LpOutcome, LpProblem, RowKind, Sense,
};
use exchange_lab::valuation::Valuation;
use rand::Rng;

/// Best total allocation by enumerating all `n^m` item → agent maps.
pub fn brute_force_optimum(e: &Economy) -> f64 {
    let m = e.num_items();
    let n = e.num_agents();
    let mut owners = vec![0usize; m];
    let mut best = f64::NEG_INFINITY;
    loop {
        let f = Allocation::total(&owners);
        best = best.max(social_value(e, &f).unwrap());
        let mut k = 0;
        loop {
            if k == m {
                return best;
            }
            owners[k] += 1;
            if owners[k] < n {
                break;
            }
            owners[k] = 0;
            k += 1;
        }
    }
}

/// Every allocation, partial ones included, as `(n + 1)^m` maps.
pub fn all_allocations(m: usize, n: usize) -> Vec<Allocation> {
    let mut out = Vec::new();
    let mut owners = vec![0usize; m];
    loop {
        out.push(Allocation::new(
            owners.iter().map(|&o| (o < n).then_some(o)).collect(),
        ));
        let mut k = 0;
        loop {
            if k == m {
                return out;
            }
            owners[k] += 1;
            if owners[k] <= n {
                break;
            }
            owners[k] = 0;
            k += 1;
        }
    }
}

/// `M_F`, certified: the primal weights satisfy every constraint, the dual
/// satisfies every constraint, and the two objectives agree. Returns
/// `(primal value, dual objective)`.
pub fn certified_fractional(e: &Economy) -> (f64, f64) {
    let (x, mf) = fractional_optimum(e).unwrap();
    let tol = 1e-8;
    for &(_, _, w) in &x.weights {
        assert!(w >= -tol && w <= 1.0 + tol, "weight {w} out of range");
    }
    assert!(x.agent_mass(e.num_agents()).iter().all(|&s| s <= 1.0 + tol));
    assert!(x.item_mass(e.num_items()).iter().all(|&s| s <= 1.0 + tol));
    assert!((x.value(e) - mf).abs() <= 1e-7);
    let d = dual_prices(e).unwrap();
    assert!(d.agent_utilities.iter().all(|&u| u >= 0.0));
    assert!(
        d.max_violation(e) <= 1e-7,
        "dual violation {}",
        d.max_violation(e)
    );
    (mf, d.objective())
}

/// Supremum `q` of `(q, q)`-local equilibria for `f` from the parametric
/// program `min z` s.t. `u(A) ≥ v_i(A | S_i)`, `u(S_i) ≤ z · v_i(S_i)`,
/// `u ≥ 0`, unallocated items fixed at 0; then `q* = 1 / sqrt(z*)`.
/// `None` means unbounded.
pub fn parametric_max_q(e: &Economy, f: &Allocation) -> Option<f64> {
    let m = e.num_items();
    let mut lp = LpProblem::new(Sense::Minimize);
    let u: Vec<Option<usize>> = (0..m)
        .map(|j| f.owner(j).map(|_| lp.add_variable(0.0)))
        .collect();
    let z = lp.add_variable(1.0);
    let terms = |b: Bundle| -> Vec<(usize, f64)> {
        b.items().filter_map(|j| u[j].map(|v| (v, 1.0))).collect()
    };
    let bundles = f.bundles(e.num_agents());
    let full = Bundle::full(m);
    let mut any_outward = false;
    for (i, &held) in bundles.iter().enumerate() {
        let v = e.valuation(i);
        for a in full.difference(held).subsets().skip(1) {
            let w = v.value(a.union(held)) - v.value(held);
            if w > 1e-9 {
                any_outward = true;
                lp.add_row(RowKind::Ge, w, &terms(a)).unwrap();
            }
        }
        if !held.is_empty() {
            let mut t = terms(held);
            t.push((z, -v.value(held)));
            lp.add_row(RowKind::Le, 0.0, &t).unwrap();
        }
    }
    if !any_outward {
        return None;
    }
    match solve(&lp).unwrap() {
        LpOutcome::Optimal(sol) if sol.objective > 1e-12 => Some(1.0 / sol.objective.sqrt()),
        LpOutcome::Optimal(_) => None,
        _ => Some(0.0),
    }
}

/// Submodularity index by the defining triple enumeration over disjoint
/// `W, A` and `x ∉ W ∪ A`. `None` for infinite.
pub fn index_by_definition(v: &Valuation) -> Option<f64> {
    let m = v.num_items();
    let full = Bundle::full(m);
    let mut a_min = 1.0f64;
    for w in Bundle::all(m) {
        for a in full.difference(w).subsets() {
            for x in full.difference(w.union(a)).items() {
                let vw = |b: Bundle| v.value(b.union(w)) - v.value(w);
                let lhs = vw(a.with(x)) - vw(a);
                let base = vw(Bundle::singleton(x));
                if base > 1e-9 {
                    a_min = a_min.max(lhs / base);
                } else if lhs > 1e-9 {
                    return None;
                }
            }
        }
    }
    Some(a_min)
}

/// Direct submodularity test `v(x | S) ≥ v(x | T)` for `S ⊆ T`, `x ∉ T`.
pub fn is_submodular(v: &Valuation) -> bool {
    let m = v.num_items();
    let full = Bundle::full(m);
    for t in Bundle::all(m) {
        for s in t.subsets() {
            for x in full.difference(t).items() {
                let ms = v.value(s.with(x)) - v.value(s);
                let mt = v.value(t.with(x)) - v.value(t);
                if mt > ms + 1e-9 {
                    return false;
                }
            }
        }
    }
    true
}

fn marg(v: &Valuation, a: Bundle, s: Bundle) -> f64 {
    v.value(a.union(s)) - v.value(s)
}

/// Growing the base by at most the factor `a`: `v(A | T) ≤ a v(A | S)` for `S ⊆ T`, `A ∩ T = ∅`.
pub fn nested_base_bound(v: &Valuation, a: f64) -> Result<(), String> {
    let m = v.num_items();
    let full = Bundle::full(m);
    for t in Bundle::all(m) {
        for s in t.subsets() {
            for aa in full.difference(t).subsets() {
                let lhs = marg(v, aa, t);
                let rhs = a * marg(v, aa, s);
                if lhs > rhs + 1e-7 {
                    return Err(format!(
                        "nested-base bound fails at S={s} T={t} A={aa}: {lhs} > {rhs}"
                    ));
                }
            }
        }
    }
    Ok(())
}

/// Each item measured against its own sub-base: `v(A | B) ≤ a Σ_{x∈A} v(x | B_x)` for all `B_x ⊆ B`. The right
/// side is separable in the `B_x`, so the worst choice minimizes each term.
pub fn separated_base_bound(v: &Valuation, a: f64) -> Result<(), String> {
    let m = v.num_items();
    let full = Bundle::full(m);
    for b in Bundle::all(m) {
        for aa in full.difference(b).subsets() {
            let lhs = marg(v, aa, b);
            let rhs: f64 = aa
                .items()
                .map(|x| {
                    b.subsets()
                        .map(|bx| marg(v, Bundle::singleton(x), bx))
                        .fold(f64::INFINITY, f64::min)
                })
                .sum();
            if lhs > a * rhs + 1e-7 {
                return Err(format!(
                    "separated-base bound fails at A={aa} B={b}: {lhs} > {a}·{rhs}"
                ));
            }
        }
    }
    Ok(())
}

/// Comparison with single-item marginals: `a v(A | S − A) ≥ Σ_{j∈A} v(j | S − j)` for `A ⊆ S`, and
/// `v(A | S) ≤ a Σ_{j∈A} v(j | S)` for `A ∩ S = ∅`.
pub fn singleton_sum_bounds(v: &Valuation, a: f64) -> Result<(), String> {
    let m = v.num_items();
    let full = Bundle::full(m);
    for s in Bundle::all(m) {
        for aa in s.subsets() {
            let lhs = a * marg(v, aa, s.difference(aa));
            let rhs: f64 = aa
                .items()
                .map(|j| marg(v, Bundle::singleton(j), s.without(j)))
                .sum();
            if lhs + 1e-7 < rhs {
                return Err(format!(
                    "singleton-sum bound (held) fails at A={aa} S={s}: {lhs} < {rhs}"
                ));
            }
        }
        for aa in full.difference(s).subsets() {
            let lhs = marg(v, aa, s);
            let rhs: f64 = aa.items().map(|j| marg(v, Bundle::singleton(j), s)).sum();
            if lhs > a * rhs + 1e-7 {
                return Err(format!(
                    "singleton-sum bound (outside) fails at A={aa} S={s}: {lhs} > {a}·{rhs}"
                ));
            }
        }
    }
    Ok(())
}

pub fn random_total_allocation<R: Rng>(e: &Economy, rng: &mut R) -> Allocation {
    let owners: Vec<usize> = (0..e.num_items())
        .map(|_| rng.gen_range(0..e.num_agents()))
        .collect();
    Allocation::total(&owners)
}

pub fn random_allocation<R: Rng>(e: &Economy, rng: &mut R) -> Allocation {
    Allocation::new(
        (0..e.num_items())
            .map(|_| {
                let k = rng.gen_range(0..=e.num_agents());
                (k < e.num_agents()).then_some(k)
            })
            .collect(),
    )
}

/// Random quarter-step prices, zero on unallocated items.
pub fn random_prices<R: Rng>(f: &Allocation, rng: &mut R) -> PriceVector {
    PriceVector::new(
        f.assignment()
            .iter()
            .map(|o| {
                if o.is_some() {
                    f64::from(rng.gen_range(0..=40u32)) / 4.0
                } else {
                    0.0
                }
            })
            .collect(),
    )
    .unwrap()
}

pub fn random_order<R: Rng>(m: usize, rng: &mut R) -> Vec<usize> {
    use rand::seq::SliceRandom;
    let mut order: Vec<usize> = (0..m).collect();
    order.shuffle(rng);
    order
}
