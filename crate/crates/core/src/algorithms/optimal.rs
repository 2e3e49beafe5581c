use crate::bundle::Bundle;
use crate::economy::{Allocation, Economy};

/// Exact integral optimum `M` by dynamic programming over item subsets,
/// `W_k(S) = max_{T ⊆ S} W_{k−1}(S − T) + v_k(T)`, in `O(n · 3^m)`.
///
/// Every item is allocated. Among maximal choices the first submask in
/// increasing order wins, so later agents take the smallest optimal share.
pub fn optimal_allocation(e: &Economy) -> (Allocation, f64) {
    let m = e.num_items();
    let n = e.num_agents();
    let size = 1usize << m;
    let mut prev = vec![f64::NEG_INFINITY; size];
    prev[0] = 0.0;
    let mut choice: Vec<Vec<u32>> = Vec::with_capacity(n);
    for k in 0..n {
        let table = e.valuation(k).table();
        let mut cur = vec![f64::NEG_INFINITY; size];
        let mut pick = vec![0u32; size];
        for s in 0..size {
            let set = Bundle::from_mask(s as u32);
            for t in set.subsets() {
                let base = prev[set.difference(t).index()];
                if base == f64::NEG_INFINITY {
                    continue;
                }
                let value = base + table[t.index()];
                if value > cur[s] {
                    cur[s] = value;
                    pick[s] = t.mask();
                }
            }
        }
        choice.push(pick);
        prev = cur;
    }
    let mut f = Allocation::unallocated(m);
    let mut rest = Bundle::full(m);
    for k in (0..n).rev() {
        let t = Bundle::from_mask(choice[k][rest.index()]);
        for j in t.items() {
            f.assign(j, Some(k));
        }
        rest = rest.difference(t);
    }
    (f, prev[size - 1])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::economy::social_value;
    use crate::valuation::Valuation;

    #[test]
    fn example_optima() {
        let (f, value) = optimal_allocation(&catalog::no_walrasian().economy);
        assert_eq!(value, 4.0);
        assert!(f.is_total());
        assert_eq!(
            social_value(&catalog::no_walrasian().economy, &f).unwrap(),
            4.0
        );
        assert_eq!(
            optimal_allocation(&catalog::no_equal_prices().economy).1,
            1.0
        );
        assert_eq!(optimal_allocation(&catalog::first().economy).1, 8.0);
        assert_eq!(optimal_allocation(&catalog::no_pareto().economy).1, 9.0);
    }

    #[test]
    fn zero_economy() {
        let e = Economy::from_valuations(vec![Valuation::zero(3), Valuation::zero(3)]).unwrap();
        let (f, value) = optimal_allocation(&e);
        assert_eq!(value, 0.0);
        assert!(f.is_total());
    }
}
