//! Core data model: problem instances, binary solutions and the resource
//! bookkeeping both need.
//!
//! All instance data is integral (profits, weights, capacities are `i64`),
//! so feasibility is decided by exact integer comparison. Floating point
//! only appears downstream, in the LP relaxation and efficiency values.

use thiserror::Error;

/// Validation errors raised when assembling an [`Instance`].
#[derive(Debug, Error, PartialEq, Eq)]
pub enum InstanceError {
    #[error("instance must have at least one item and one resource (n={n}, m={m})")]
    EmptyDimensions { n: usize, m: usize },
    #[error("profit of item {item} must be positive, got {value}")]
    NonPositiveProfit { item: usize, value: i64 },
    #[error("capacity of resource {resource} must be positive, got {value}")]
    NonPositiveCapacity { resource: usize, value: i64 },
    #[error("weight of item {item} in resource {resource} must be non-negative, got {value}")]
    NegativeWeight {
        resource: usize,
        item: usize,
        value: i64,
    },
    #[error("expected {expected} {what}, got {actual}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        actual: usize,
    },
}

/// A multidimensional knapsack instance: `n` items, `m` resources.
///
/// Immutable after construction; shared freely across concurrent runs.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    name: String,
    n: usize,
    m: usize,
    profits: Vec<i64>,
    /// Row-major m x n (resource-major), as read from instance files.
    rows: Vec<i64>,
    /// Column-major n x m (item-major); contiguous per-item weight slices
    /// for the feasibility hot path.
    cols: Vec<i64>,
    capacities: Vec<i64>,
    best_known: Option<i64>,
}

impl Instance {
    /// Builds and validates an instance. `weights` is addressed as
    /// `weights[resource][item]`.
    pub fn new(
        name: impl Into<String>,
        profits: Vec<i64>,
        weights: Vec<Vec<i64>>,
        capacities: Vec<i64>,
        best_known: Option<i64>,
    ) -> Result<Self, InstanceError> {
        let n = profits.len();
        let m = capacities.len();
        if n == 0 || m == 0 {
            return Err(InstanceError::EmptyDimensions { n, m });
        }
        if weights.len() != m {
            return Err(InstanceError::DimensionMismatch {
                what: "weight rows",
                expected: m,
                actual: weights.len(),
            });
        }
        for (i, row) in weights.iter().enumerate() {
            if row.len() != n {
                return Err(InstanceError::DimensionMismatch {
                    what: "weights in row",
                    expected: n,
                    actual: row.len(),
                });
            }
            for (j, &w) in row.iter().enumerate() {
                if w < 0 {
                    return Err(InstanceError::NegativeWeight {
                        resource: i,
                        item: j,
                        value: w,
                    });
                }
            }
        }
        for (j, &p) in profits.iter().enumerate() {
            if p <= 0 {
                return Err(InstanceError::NonPositiveProfit { item: j, value: p });
            }
        }
        for (i, &r) in capacities.iter().enumerate() {
            if r <= 0 {
                return Err(InstanceError::NonPositiveCapacity {
                    resource: i,
                    value: r,
                });
            }
        }

        let mut rows = Vec::with_capacity(m * n);
        for row in &weights {
            rows.extend_from_slice(row);
        }
        let mut cols = vec![0i64; n * m];
        for i in 0..m {
            for j in 0..n {
                cols[j * m + i] = rows[i * n + j];
            }
        }
        Ok(Self {
            name: name.into(),
            n,
            m,
            profits,
            rows,
            cols,
            capacities,
            best_known,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    /// Number of items.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of resources.
    pub fn m(&self) -> usize {
        self.m
    }

    pub fn profits(&self) -> &[i64] {
        &self.profits
    }

    pub fn profit(&self, item: usize) -> i64 {
        self.profits[item]
    }

    pub fn capacities(&self) -> &[i64] {
        &self.capacities
    }

    pub fn capacity(&self, resource: usize) -> i64 {
        self.capacities[resource]
    }

    pub fn weight(&self, resource: usize, item: usize) -> i64 {
        self.rows[resource * self.n + item]
    }

    /// Weights of one resource row, length `n`.
    pub fn resource_weights(&self, resource: usize) -> &[i64] {
        &self.rows[resource * self.n..(resource + 1) * self.n]
    }

    /// Weights consumed by one item across all resources, length `m`.
    pub fn item_weights(&self, item: usize) -> &[i64] {
        &self.cols[item * self.m..(item + 1) * self.m]
    }

    pub fn best_known(&self) -> Option<i64> {
        self.best_known
    }

    /// Pure objective: sum of profits over selected items.
    ///
    /// Panics if `bits` has the wrong length.
    pub fn objective(&self, bits: &[bool]) -> i64 {
        assert_eq!(bits.len(), self.n, "objective: bit vector length mismatch");
        self.profits
            .iter()
            .zip(bits)
            .filter(|(_, &b)| b)
            .map(|(&p, _)| p)
            .sum()
    }
}

/// A binary selection vector with cached profit and per-resource usage.
///
/// The caches are maintained incrementally by [`Solution::set_bit`]; every
/// mutation keeps `profit == sum(p_j x_j)` and `usage[i] == sum(w_ij x_j)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    bits: Vec<bool>,
    profit: i64,
    usage: Vec<i64>,
}

impl Solution {
    /// The empty knapsack (always feasible).
    pub fn empty(inst: &Instance) -> Self {
        Self {
            bits: vec![false; inst.n()],
            profit: 0,
            usage: vec![0; inst.m()],
        }
    }

    /// Builds a solution from a raw bit vector, computing the caches.
    ///
    /// Panics if `bits` has the wrong length.
    pub fn from_bits(inst: &Instance, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), inst.n(), "from_bits: bit vector length mismatch");
        let mut sol = Self {
            bits,
            profit: 0,
            usage: vec![0; inst.m()],
        };
        for j in 0..inst.n() {
            if sol.bits[j] {
                sol.profit += inst.profit(j);
                for (u, &w) in sol.usage.iter_mut().zip(inst.item_weights(j)) {
                    *u += w;
                }
            }
        }
        sol
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn bit(&self, item: usize) -> bool {
        self.bits[item]
    }

    /// Cached objective value.
    pub fn profit(&self) -> i64 {
        self.profit
    }

    /// Cached per-resource consumption.
    pub fn usage(&self) -> &[i64] {
        &self.usage
    }

    /// Sets one bit, updating the caches in O(m). A no-op when the bit
    /// already holds `value`.
    ///
    /// Panics if `item` is out of range.
    pub fn set_bit(&mut self, item: usize, value: bool, inst: &Instance) {
        assert!(item < self.bits.len(), "set_bit: item index out of range");
        if self.bits[item] == value {
            return;
        }
        self.bits[item] = value;
        let weights = inst.item_weights(item);
        if value {
            self.profit += inst.profit(item);
            for (u, &w) in self.usage.iter_mut().zip(weights) {
                *u += w;
            }
        } else {
            self.profit -= inst.profit(item);
            for (u, &w) in self.usage.iter_mut().zip(weights) {
                *u -= w;
            }
        }
    }

    /// True iff no resource is over capacity. Exact integer comparison.
    pub fn is_feasible(&self, inst: &Instance) -> bool {
        self.usage
            .iter()
            .zip(inst.capacities())
            .all(|(&u, &r)| u <= r)
    }

    /// True iff the (currently unselected) item can be added without
    /// violating any capacity.
    ///
    /// Panics if the item is already selected; callers check the bit first.
    pub fn fits(&self, item: usize, inst: &Instance) -> bool {
        assert!(
            !self.bits[item],
            "fits: item {item} is already in the knapsack"
        );
        self.usage
            .iter()
            .zip(inst.item_weights(item))
            .zip(inst.capacities())
            .all(|((&u, &w), &r)| u + w <= r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::prelude::*;
    use rand_chacha::ChaCha8Rng;

    fn inst(profits: &[i64], weights: &[&[i64]], capacities: &[i64]) -> Instance {
        Instance::new(
            "test",
            profits.to_vec(),
            weights.iter().map(|r| r.to_vec()).collect(),
            capacities.to_vec(),
            None,
        )
        .unwrap()
    }

    #[test]
    fn objective_examples() {
        let i = inst(&[10, 6, 8], &[&[1, 1, 1]], &[100]);
        assert_eq!(i.objective(&[true, false, true]), 18);
        assert_eq!(i.objective(&[false, false, false]), 0);
        let i = inst(&[6, 5, 4], &[&[1, 1, 1]], &[100]);
        assert_eq!(i.objective(&[true, true, true]), 15);
    }

    #[test]
    fn objective_is_linear() {
        // f(a) + f(b) = f(a|b) + f(a&b)
        let i = inst(&[7, 3, 11, 2, 5], &[&[1, 1, 1, 1, 1]], &[100]);
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..200 {
            let a: Vec<bool> = (0..5).map(|_| rng.gen_bool(0.5)).collect();
            let b: Vec<bool> = (0..5).map(|_| rng.gen_bool(0.5)).collect();
            let or: Vec<bool> = a.iter().zip(&b).map(|(&x, &y)| x | y).collect();
            let and: Vec<bool> = a.iter().zip(&b).map(|(&x, &y)| x & y).collect();
            assert_eq!(
                i.objective(&a) + i.objective(&b),
                i.objective(&or) + i.objective(&and)
            );
        }
    }

    #[test]
    fn feasibility_boundary() {
        let i = inst(&[1, 1, 1], &[&[2, 3, 4]], &[5]);
        let s = Solution::from_bits(&i, vec![true, true, false]);
        assert!(s.is_feasible(&i)); // usage 5 <= 5
        let s = Solution::from_bits(&i, vec![true, true, true]);
        assert!(!s.is_feasible(&i)); // 9 > 5
        let s = Solution::empty(&i);
        assert!(s.is_feasible(&i));
    }

    #[test]
    fn set_bit_involution() {
        let i = inst(&[3, 4], &[&[1, 2], &[5, 1]], &[10, 10]);
        let start = Solution::from_bits(&i, vec![true, false]);
        let mut s = start.clone();
        s.set_bit(1, true, &i);
        s.set_bit(1, false, &i);
        assert_eq!(s, start);
    }

    #[test]
    fn set_bit_from_empty() {
        let i = inst(&[3, 4], &[&[1, 2], &[5, 1]], &[10, 10]);
        let mut s = Solution::empty(&i);
        s.set_bit(1, true, &i);
        assert_eq!(s.profit(), 4);
        assert_eq!(s.usage(), &[2, 1]);
    }

    #[test]
    fn caches_match_recompute_after_random_mutations() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let i = inst(
            &[5, 9, 2, 7, 4, 8],
            &[&[1, 4, 2, 3, 0, 5], &[2, 0, 1, 6, 3, 2], &[4, 4, 4, 1, 1, 1]],
            &[50, 50, 50],
        );
        let mut s = Solution::empty(&i);
        for _ in 0..10_000 {
            let j = rng.gen_range(0..i.n());
            let v = rng.gen_bool(0.5);
            s.set_bit(j, v, &i);
            let fresh = Solution::from_bits(&i, s.bits().to_vec());
            assert_eq!(s, fresh);
        }
    }

    #[test]
    fn fits_examples() {
        let i = inst(&[1, 1], &[&[2, 2], &[1, 1]], &[5, 2]);
        let s = Solution::empty(&i);
        assert!(s.fits(0, &i));
        // zero slack in one dimension
        let i = inst(&[1, 1], &[&[5, 1]], &[5]);
        let mut s = Solution::empty(&i);
        s.set_bit(0, true, &i);
        assert!(!s.fits(1, &i));
        // boundary in both dimensions
        let i = inst(&[1, 1], &[&[3, 2], &[1, 1]], &[5, 2]);
        let mut s = Solution::empty(&i);
        s.set_bit(0, true, &i);
        assert!(s.fits(1, &i));
    }

    #[test]
    #[should_panic(expected = "already in the knapsack")]
    fn fits_rejects_selected_item() {
        let i = inst(&[1], &[&[1]], &[5]);
        let mut s = Solution::empty(&i);
        s.set_bit(0, true, &i);
        s.fits(0, &i);
    }

    #[test]
    fn validation_errors() {
        assert!(matches!(
            Instance::new("x", vec![0], vec![vec![1]], vec![1], None),
            Err(InstanceError::NonPositiveProfit { item: 0, .. })
        ));
        assert!(matches!(
            Instance::new("x", vec![1], vec![vec![1]], vec![0], None),
            Err(InstanceError::NonPositiveCapacity { resource: 0, .. })
        ));
        assert!(matches!(
            Instance::new("x", vec![1], vec![vec![-1]], vec![1], None),
            Err(InstanceError::NegativeWeight { .. })
        ));
        assert!(matches!(
            Instance::new("x", vec![1, 2], vec![vec![1]], vec![1], None),
            Err(InstanceError::DimensionMismatch { .. })
        ));
    }
}
