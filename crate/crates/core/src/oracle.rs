//! Exact small-instance solvers used as ground truth in tests and audits.
//!
//! Plain 2^n enumeration, capped at 25 items so a run stays in the seconds
//! range and the code stays trivially auditable.

use thiserror::Error;

use crate::instance::Instance;
use crate::lp::LpSolution;

/// Largest item count the enumeration accepts.
pub const MAX_ENUMERATION_ITEMS: usize = 25;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("enumeration supports at most {max} items, instance has {n}")]
    TooManyItems { n: usize, max: usize },
}

/// Exhaustively finds the optimal feasible objective value and one optimal
/// selection. Value ties resolve to the lexicographically smallest bit
/// vector (`bits[0]` most significant).
///
/// Masks are visited in ascending numeric order with `bits[0]` mapped to the
/// top bit, so numeric order is lexicographic order and the first optimum
/// found under a strict comparison is the lexicographically smallest one.
/// Successive masks differ in a short bit suffix, which keeps the usage
/// update incremental.
pub fn enumerate_optimum(inst: &Instance) -> Result<(i64, Vec<bool>), OracleError> {
    let n = inst.n();
    if n > MAX_ENUMERATION_ITEMS {
        return Err(OracleError::TooManyItems {
            n,
            max: MAX_ENUMERATION_ITEMS,
        });
    }
    let m = inst.m();

    let bit_of_item = |item: usize| 1u64 << (n - 1 - item);

    let mut usage = vec![0i64; m];
    let mut profit = 0i64;
    let mut violated = usage
        .iter()
        .zip(inst.capacities())
        .filter(|(&u, &r)| u > r)
        .count();

    let mut best_value = 0i64; // empty set is always feasible
    let mut best_mask = 0u64;

    let mut mask = 0u64;
    let last = (1u64 << n) - 1;
    while mask < last {
        // Flip the bits that change between mask and mask + 1.
        let diff = mask ^ (mask + 1);
        mask += 1;
        for b in 0..n as u32 {
            if diff & (1 << b) == 0 {
                continue;
            }
            let item = n - 1 - b as usize;
            let selected = mask & (1 << b) != 0;
            let sign = if selected { 1 } else { -1 };
            profit += sign * inst.profit(item);
            for (i, &w) in inst.item_weights(item).iter().enumerate() {
                let before = usage[i] > inst.capacity(i);
                usage[i] += sign * w;
                let after = usage[i] > inst.capacity(i);
                match (before, after) {
                    (false, true) => violated += 1,
                    (true, false) => violated -= 1,
                    _ => {}
                }
            }
        }
        if violated == 0 && profit > best_value {
            best_value = profit;
            best_mask = mask;
        }
    }

    let bits = (0..n).map(|j| best_mask & bit_of_item(j) != 0).collect();
    Ok((best_value, bits))
}

/// Sanity check that the LP relaxation upper-bounds the integer optimum.
pub fn lp_bound_check(inst: &Instance, lp: &LpSolution) -> Result<bool, OracleError> {
    let (optimum, _) = enumerate_optimum(inst)?;
    Ok(lp.primal_objective >= optimum as f64 - 1e-6)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::Solution;
    use crate::lp::solve_lp_relaxation;
    use crate::ordering::EfficiencyOrdering;
    use crate::repair::heuristic_repair;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn inst(profits: &[i64], weights: &[&[i64]], capacities: &[i64]) -> Instance {
        Instance::new(
            "oracle-test",
            profits.to_vec(),
            weights.iter().map(|r| r.to_vec()).collect(),
            capacities.to_vec(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn three_item_example() {
        let i = inst(&[6, 5, 4], &[&[3, 3, 3]], &[6]);
        let (value, bits) = enumerate_optimum(&i).unwrap();
        assert_eq!(value, 11);
        assert_eq!(bits, vec![true, true, false]);
    }

    #[test]
    fn everything_fits() {
        let i = inst(&[2, 3, 4], &[&[1, 1, 1]], &[10]);
        let (value, bits) = enumerate_optimum(&i).unwrap();
        assert_eq!(value, 9);
        assert_eq!(bits, vec![true; 3]);
    }

    #[test]
    fn nothing_fits() {
        let i = inst(&[5, 5], &[&[3, 4], &[2, 2]], &[1, 1]);
        let (value, bits) = enumerate_optimum(&i).unwrap();
        assert_eq!(value, 0);
        assert_eq!(bits, vec![false, false]);
    }

    #[test]
    fn lexicographic_tie_break() {
        // Items 0 and 1 are interchangeable; [0,1] precedes [1,0].
        let i = inst(&[5, 5], &[&[2, 2]], &[2]);
        let (value, bits) = enumerate_optimum(&i).unwrap();
        assert_eq!(value, 5);
        assert_eq!(bits, vec![false, true]);
    }

    #[test]
    fn size_cap_is_enforced() {
        let n = MAX_ENUMERATION_ITEMS + 1;
        let i = Instance::new(
            "big",
            vec![1; n],
            vec![vec![1; n]],
            vec![1],
            None,
        )
        .unwrap();
        assert_eq!(
            enumerate_optimum(&i),
            Err(OracleError::TooManyItems {
                n,
                max: MAX_ENUMERATION_ITEMS
            })
        );
    }

    fn random_instance(rng: &mut ChaCha8Rng, n: usize, m: usize) -> Instance {
        let weights: Vec<Vec<i64>> = (0..m)
            .map(|_| (0..n).map(|_| rng.gen_range(1..=30)).collect())
            .collect();
        let capacities: Vec<i64> = weights
            .iter()
            .map(|row| (row.iter().sum::<i64>() / 2).max(1))
            .collect();
        let profits: Vec<i64> = (0..n).map(|_| rng.gen_range(1..=100)).collect();
        Instance::new("rand", profits, weights, capacities, None).unwrap()
    }

    #[test]
    fn matches_naive_enumeration() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        for _ in 0..100 {
            let n = rng.gen_range(1..=10);
            let m = rng.gen_range(1..=3);
            let i = random_instance(&mut rng, n, m);
            let (value, bits) = enumerate_optimum(&i).unwrap();

            // naive re-enumeration without incremental updates
            let mut naive_best = 0i64;
            for mask in 0u64..(1 << n) {
                let cand: Vec<bool> = (0..n).map(|j| mask & (1 << j) != 0).collect();
                let sol = Solution::from_bits(&i, cand);
                if sol.is_feasible(&i) && sol.profit() > naive_best {
                    naive_best = sol.profit();
                }
            }
            assert_eq!(value, naive_best);
            let sol = Solution::from_bits(&i, bits);
            assert!(sol.is_feasible(&i));
            assert_eq!(sol.profit(), value);
        }
    }

    #[test]
    fn repair_never_beats_the_optimum_and_lp_bounds_it() {
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        for _ in 0..60 {
            let n = rng.gen_range(2..=12);
            let m = rng.gen_range(1..=3);
            let i = random_instance(&mut rng, n, m);
            let (optimum, _) = enumerate_optimum(&i).unwrap();

            let lp = solve_lp_relaxation(&i);
            assert!(lp.is_optimal());
            assert!(lp_bound_check(&i, &lp).unwrap());

            let perm: Vec<usize> = (0..n).collect();
            let ord = EfficiencyOrdering::new(perm, vec![0.5; n]);
            for _ in 0..20 {
                let bits: Vec<bool> = (0..n).map(|_| rng.gen_bool(0.5)).collect();
                let mut sol = Solution::from_bits(&i, bits);
                heuristic_repair(&mut sol, &ord, &i);
                assert!(sol.profit() <= optimum);
            }
        }
    }

    #[test]
    fn integral_lp_equals_integer_optimum() {
        // all weights 1, integer capacity: the LP optimum is integral
        let i = inst(&[9, 7, 5, 3], &[&[1, 1, 1, 1]], &[2]);
        let (optimum, _) = enumerate_optimum(&i).unwrap();
        assert_eq!(optimum, 16);
        let lp = solve_lp_relaxation(&i);
        assert!(lp.is_optimal());
        assert!((lp.primal_objective - optimum as f64).abs() <= 1e-6);
    }
}
