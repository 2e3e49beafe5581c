use crate::bundle::Bundle;
use crate::economy::{Allocation, Economy, PriceVector};
use crate::equilibrium::{EquilibriumVerdict, Quality, QualityReport, Witness};
use crate::error::{Error, Result};
use crate::tolerance::eps;

fn check_inputs(e: &Economy, f: &Allocation, p: &PriceVector) -> Result<()> {
    e.check_allocation(f)?;
    e.check_prices(p)
}

fn unallocated_priced(f: &Allocation, p: &PriceVector) -> Vec<Witness> {
    f.unallocated_bundle()
        .items()
        .filter(|&j| p.get(j) > eps())
        .map(|item| Witness::UnallocatedPriced {
            item,
            price: p.get(item),
        })
        .collect()
}

/// Exact `(r*, s*)` by enumeration of every bundle outside each agent's holding.
pub fn max_quality(e: &Economy, f: &Allocation, p: &PriceVector) -> Result<QualityReport> {
    check_inputs(e, f, p)?;
    let tol = eps();
    let totals = p.bundle_totals();
    let full = e.full_bundle();
    let bundles = f.bundles(e.num_agents());

    let mut r_star = Quality::Infinite;
    let mut binding_ir_agent = None;
    let mut s_star = Quality::Infinite;
    let mut binding_os_witness = None;

    for (i, &held) in bundles.iter().enumerate() {
        let v = e.valuation(i);
        let paid = totals[held.index()];
        if paid > tol {
            let r = v.value(held) / paid;
            if r_star.finite().is_none_or(|cur| r < cur) {
                r_star = Quality::Finite(r);
                binding_ir_agent = Some(i);
            }
        }
        for a in full.difference(held).subsets().skip(1) {
            let w = v.marginal(a, held);
            if w <= tol {
                continue;
            }
            let s = totals[a.index()] / w;
            if s_star.finite().is_none_or(|cur| s < cur) {
                s_star = Quality::Finite(s);
                binding_os_witness = Some((i, a));
            }
        }
    }

    Ok(QualityReport {
        r_star,
        s_star,
        unallocated_price_ok: unallocated_priced(f, p).is_empty(),
        binding_ir_agent,
        binding_os_witness,
    })
}

/// Checks the three local-equilibrium conditions at `(r, s)`, listing every failure.
pub fn verify_local_equilibrium(
    e: &Economy,
    f: &Allocation,
    p: &PriceVector,
    r: f64,
    s: f64,
) -> Result<EquilibriumVerdict> {
    check_inputs(e, f, p)?;
    if !(r >= 0.0 && s >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "quality parameters must be nonnegative, got r = {r}, s = {s}"
        )));
    }
    let tol = eps();
    let totals = p.bundle_totals();
    let full = e.full_bundle();
    let mut violations = unallocated_priced(f, p);
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let v = e.valuation(i);
        let value = v.value(held);
        let paid = totals[held.index()];
        if value < r * paid - tol {
            violations.push(Witness::IndividualRationality {
                agent: i,
                value,
                price_total: paid,
            });
        }
        for a in full.difference(held).subsets().skip(1) {
            let w = v.marginal(a, held);
            if w > tol && s * w > totals[a.index()] + tol {
                violations.push(Witness::OutwardStability {
                    agent: i,
                    bundle: a,
                    marginal: w,
                    price_total: totals[a.index()],
                });
            }
        }
    }
    Ok(EquilibriumVerdict::from_violations(violations))
}

/// Strong individual rationality with price multiplier `c`:
/// `v_i(A | S_i − A) ≥ c · p(A)` for every nonempty `A ⊆ S_i`.
pub fn verify_strong_ir(
    e: &Economy,
    f: &Allocation,
    p: &PriceVector,
    c: f64,
) -> Result<EquilibriumVerdict> {
    check_inputs(e, f, p)?;
    if !(c >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "price multiplier must be nonnegative, got {c}"
        )));
    }
    let tol = eps();
    let totals = p.bundle_totals();
    let mut violations = Vec::new();
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let v = e.valuation(i);
        for a in held.subsets().skip(1) {
            let w = v.marginal(a, held.difference(a));
            if w < c * totals[a.index()] - tol {
                violations.push(Witness::StrongRationality {
                    agent: i,
                    bundle: a,
                    marginal: w,
                    price_total: totals[a.index()],
                });
            }
        }
    }
    Ok(EquilibriumVerdict::from_violations(violations))
}

/// Walrasian check: zero-priced unallocated items and every agent's bundle
/// maximizes `v_i(D) − p(D)` over all `2^m` bundles.
pub fn verify_walrasian(
    e: &Economy,
    f: &Allocation,
    p: &PriceVector,
) -> Result<EquilibriumVerdict> {
    check_inputs(e, f, p)?;
    let tol = eps();
    let totals = p.bundle_totals();
    let mut violations = unallocated_priced(f, p);
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let table = e.valuation(i).table();
        let held_utility = table[held.index()] - totals[held.index()];
        for (mask, (v, t)) in table.iter().zip(&totals).enumerate() {
            let u = v - t;
            if u > held_utility + tol {
                violations.push(Witness::NoRegret {
                    agent: i,
                    bundle: Bundle::from_mask(mask as u32),
                    held_utility,
                    bundle_utility: u,
                });
            }
        }
    }
    Ok(EquilibriumVerdict::from_violations(violations))
}

fn swap_violations(e: &Economy, f: &Allocation, p: &PriceVector, out: &mut Vec<Witness>) {
    let tol = eps();
    let full = e.full_bundle();
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let v = e.valuation(i);
        for j in held.items() {
            for k in full.difference(held).items() {
                let value_loss = v.value(held) - v.value(held.without(j).with(k));
                let price_gap = p.get(j) - p.get(k);
                if value_loss < price_gap - tol {
                    out.push(Witness::SingleSwap {
                        agent: i,
                        give: j,
                        take: k,
                        value_loss,
                        price_gap,
                    });
                }
            }
        }
    }
}

/// `v_i(S_i) − v_i(S_i − j + k) ≥ p_j − p_k` for all `j ∈ S_i`, `k ∉ S_i`.
pub fn check_single_swap(
    e: &Economy,
    f: &Allocation,
    p: &PriceVector,
) -> Result<EquilibriumVerdict> {
    check_inputs(e, f, p)?;
    let mut violations = Vec::new();
    swap_violations(e, f, p, &mut violations);
    Ok(EquilibriumVerdict::from_violations(violations))
}

/// The single-swap condition together with single-item drops,
/// `v_i(S_i) − v_i(S_i − j) ≥ p_j`. With outward stability at `s = 1`
/// covering single-item additions, this is the full single-improvement
/// neighbourhood `|S Δ A| ≤ 2`.
pub fn check_single_improvement(
    e: &Economy,
    f: &Allocation,
    p: &PriceVector,
) -> Result<EquilibriumVerdict> {
    check_inputs(e, f, p)?;
    let tol = eps();
    let mut violations = Vec::new();
    swap_violations(e, f, p, &mut violations);
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let v = e.valuation(i);
        for j in held.items() {
            let value_loss = v.item_marginal(j, held.without(j));
            if value_loss < p.get(j) - tol {
                violations.push(Witness::SingleDrop {
                    agent: i,
                    item: j,
                    value_loss,
                    price: p.get(j),
                });
            }
        }
    }
    Ok(EquilibriumVerdict::from_violations(violations))
}

/// The largest `q ∈ [0, 1]` with `u_i(S_i) ≥ q · u_i(A)` for all `i`, `A`,
/// or 0 when an unallocated item is priced or some held utility is negative.
pub fn quasi_walrasian_quality(e: &Economy, f: &Allocation, p: &PriceVector) -> Result<f64> {
    check_inputs(e, f, p)?;
    let tol = eps();
    if !unallocated_priced(f, p).is_empty() {
        return Ok(0.0);
    }
    let totals = p.bundle_totals();
    let mut q = 1.0f64;
    for (i, held) in f.bundles(e.num_agents()).into_iter().enumerate() {
        let table = e.valuation(i).table();
        let held_utility = table[held.index()] - totals[held.index()];
        if held_utility < -tol {
            return Ok(0.0);
        }
        for (v, t) in table.iter().zip(&totals) {
            let u = v - t;
            if u > tol {
                q = q.min(held_utility.max(0.0) / u);
            }
        }
    }
    Ok(q.max(0.0))
}
