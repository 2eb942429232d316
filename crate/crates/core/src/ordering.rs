//! Efficiency groups and the two ordering-randomization operators.
//!
//! Rounding the scaled efficiencies to `d` decimals collapses near-equal
//! items onto plateaus; every maximal run of two or more positions sharing a
//! rounded value is an efficiency group. The operators permute items inside
//! one randomly chosen group, so the rounded-efficiency profile along the
//! ordering never changes, only the strict order of rounding-equal items.

use rand::Rng;

use std::ops::Range;

/// Item ordering used by the heuristic repair: `perm[0]` is the position of
/// the most efficient item.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyOrdering {
    perm: Vec<usize>,
    /// Scaled efficiency per item index (not per position).
    eff_scaled: Vec<f64>,
}

impl EfficiencyOrdering {
    /// Wraps an existing permutation. Callers are expected to hand in a
    /// permutation sorted by non-increasing scaled efficiency.
    pub fn new(perm: Vec<usize>, eff_scaled: Vec<f64>) -> Self {
        debug_assert_eq!(perm.len(), eff_scaled.len());
        debug_assert!({
            let mut seen = vec![false; perm.len()];
            perm.iter().all(|&j| {
                let fresh = !seen[j];
                seen[j] = true;
                fresh
            })
        });
        Self { perm, eff_scaled }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    pub fn perm(&self) -> &[usize] {
        &self.perm
    }

    /// Item index occupying the given position.
    pub fn item_at(&self, position: usize) -> usize {
        self.perm[position]
    }

    pub fn scaled(&self) -> &[f64] {
        &self.eff_scaled
    }

    /// Scaled efficiency of the item at a position.
    pub fn scaled_at(&self, position: usize) -> f64 {
        self.eff_scaled[self.perm[position]]
    }
}

/// `round(x * 10^d)` as an exact integer key; equal keys mean equal values
/// after rounding half away from zero at `d` decimals.
pub fn rounded_key(x: f64, decimals: u32) -> i64 {
    (x * 10f64.powi(decimals as i32) + 0.5).floor() as i64
}

/// The rounded value itself, for display.
pub fn round_scaled(x: f64, decimals: u32) -> f64 {
    rounded_key(x, decimals) as f64 / 10f64.powi(decimals as i32)
}

/// Position ranges of the ordering whose rounded efficiencies coincide.
/// Immutable once computed; the operators only permute inside the ranges.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EfficiencyGroups {
    decimals: u32,
    spans: Vec<Range<usize>>,
}

impl EfficiencyGroups {
    pub fn decimals(&self) -> u32 {
        self.decimals
    }

    pub fn spans(&self) -> &[Range<usize>] {
        &self.spans
    }

    pub fn len(&self) -> usize {
        self.spans.len()
    }

    pub fn is_empty(&self) -> bool {
        self.spans.is_empty()
    }

    /// Group id covering a position, if any.
    pub fn group_of(&self, position: usize) -> Option<usize> {
        self.spans.iter().position(|s| s.contains(&position))
    }
}

/// Collects the maximal runs of rounding-equal positions, keeping only runs
/// of two or more items. Singleton runs are not groups and never move.
pub fn get_efficiency_groups(ordering: &EfficiencyOrdering, decimals: u32) -> EfficiencyGroups {
    assert!(decimals >= 1, "rounding depth must be at least one decimal");
    let n = ordering.len();
    let keys: Vec<i64> = (0..n)
        .map(|pos| rounded_key(ordering.scaled_at(pos), decimals))
        .collect();
    debug_assert!(keys.windows(2).all(|w| w[0] >= w[1]), "ordering not sorted");

    let mut spans = Vec::new();
    let mut run_start = 0;
    for pos in 1..=n {
        if pos == n || keys[pos] != keys[run_start] {
            if pos - run_start >= 2 {
                spans.push(run_start..pos);
            }
            run_start = pos;
        }
    }
    EfficiencyGroups { decimals, spans }
}

/// Swaps two distinct random positions inside one random group. Returns
/// false (a no-op) when there are no groups.
pub fn rg_swap<R: Rng>(
    ordering: &mut EfficiencyOrdering,
    groups: &EfficiencyGroups,
    rng: &mut R,
) -> bool {
    if groups.is_empty() {
        return false;
    }
    let span = &groups.spans[rng.gen_range(0..groups.spans.len())];
    let a = rng.gen_range(span.start..span.end);
    let mut b = rng.gen_range(span.start..span.end - 1);
    if b >= a {
        b += 1;
    }
    ordering.perm.swap(a, b);
    true
}

/// Applies a uniform random permutation (Fisher-Yates) to the positions of
/// one random group. Returns false (a no-op) when there are no groups.
pub fn rg_shuffle<R: Rng>(
    ordering: &mut EfficiencyOrdering,
    groups: &EfficiencyGroups,
    rng: &mut R,
) -> bool {
    if groups.is_empty() {
        return false;
    }
    let span = &groups.spans[rng.gen_range(0..groups.spans.len())];
    // Fisher-Yates over the group's slice of the permutation.
    for k in (1..span.len()).rev() {
        let other = rng.gen_range(0..=k);
        ordering.perm.swap(span.start + k, span.start + other);
    }
    true
}
