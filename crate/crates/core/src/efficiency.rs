//! Item efficiencies and the ordering they induce.
//!
//! The efficiency of an item is its profit divided by a weighted sum of the
//! resources it consumes; the weights are the capacity-row duals of the LP
//! relaxation (or uniform ones as a fallback). Items sorted by non-increasing
//! efficiency give the scan order the heuristic repair follows.

use thiserror::Error;

use crate::instance::Instance;
use crate::lp::solve_lp_relaxation;
use crate::ordering::EfficiencyOrdering;

/// Which weight vector fed the efficiency computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WeightSource {
    Dual,
    UniformFallback,
}

impl WeightSource {
    pub fn as_str(&self) -> &'static str {
        match self {
            WeightSource::Dual => "dual",
            WeightSource::UniformFallback => "uniform_fallback",
        }
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum EfficiencyError {
    /// The weighted resource consumption of some item is zero, so its
    /// efficiency is undefined under these weights.
    #[error("weighted resource consumption of item {item} is zero under the given weights")]
    DegenerateWeights { item: usize },
    #[error("expected {expected} weights, got {actual}")]
    WeightCountMismatch { expected: usize, actual: usize },
    #[error("weight {index} is negative ({value})")]
    NegativeWeight { index: usize, value: f64 },
}

/// Raw efficiencies plus their min-max scaling to `[0, 1]`.
///
/// Rounding and grouping operate on the scaled values, which makes the
/// rounding depth comparable across instances of different magnitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyVector {
    values: Vec<f64>,
    scaled: Vec<f64>,
}

impl EfficiencyVector {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn scaled(&self) -> &[f64] {
        &self.scaled
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Computes `e_j = p_j / sum_i lambda_i w_ij` for every item, along with the
/// min-max scaled copy. A constant vector scales to 0.5 everywhere.
pub fn compute_efficiencies(
    inst: &Instance,
    lambda: &[f64],
) -> Result<EfficiencyVector, EfficiencyError> {
    if lambda.len() != inst.m() {
        return Err(EfficiencyError::WeightCountMismatch {
            expected: inst.m(),
            actual: lambda.len(),
        });
    }
    if let Some((i, &l)) = lambda.iter().enumerate().find(|(_, &l)| l < 0.0) {
        return Err(EfficiencyError::NegativeWeight { index: i, value: l });
    }

    let mut values = Vec::with_capacity(inst.n());
    for j in 0..inst.n() {
        let denom: f64 = lambda
            .iter()
            .zip(inst.item_weights(j))
            .map(|(&l, &w)| l * w as f64)
            .sum();
        if denom <= 0.0 {
            return Err(EfficiencyError::DegenerateWeights { item: j });
        }
        values.push(inst.profit(j) as f64 / denom);
    }

    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    let max = values.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let scaled = if max > min {
        values.iter().map(|&v| (v - min) / (max - min)).collect()
    } else {
        vec![0.5; values.len()]
    };
    Ok(EfficiencyVector { values, scaled })
}

/// Uniform fallback weights (all ones), used when the LP fails or the dual
/// weights leave some item unpriced.
pub fn uniform_weights(inst: &Instance) -> Vec<f64> {
    vec![1.0; inst.m()]
}

/// Efficiencies from the LP duals, degrading to uniform weights when the LP
/// fails or leaves some item unpriced. Errors only when even the uniform
/// weights are degenerate (an item consuming nothing anywhere).
pub fn dual_or_uniform_efficiencies(
    inst: &Instance,
) -> Result<(EfficiencyVector, WeightSource), EfficiencyError> {
    let lp = solve_lp_relaxation(inst);
    if lp.is_optimal() {
        match compute_efficiencies(inst, &lp.duals) {
            Ok(eff) => return Ok((eff, WeightSource::Dual)),
            Err(EfficiencyError::DegenerateWeights { .. }) => {}
            Err(other) => return Err(other),
        }
    }
    let eff = compute_efficiencies(inst, &uniform_weights(inst))?;
    Ok((eff, WeightSource::UniformFallback))
}

/// Sorts item indices by non-increasing efficiency; ties break on the
/// ascending original index.
pub fn dual_ordering(eff: &EfficiencyVector) -> EfficiencyOrdering {
    let mut perm: Vec<usize> = (0..eff.len()).collect();
    perm.sort_by(|&a, &b| {
        eff.values[b]
            .partial_cmp(&eff.values[a])
            .expect("efficiency values are finite")
            .then(a.cmp(&b))
    });
    EfficiencyOrdering::new(perm, eff.scaled.clone())
}
