//! Experiment execution and aggregation.
//!
//! Every (instance, algorithm, seed) run is independent, so the harness
//! dispatches them to a rayon pool and restores a deterministic order by
//! sorting on that key afterwards. Wall time is the only field parallelism
//! (or anything else) may change between repeated executions.

use std::collections::BTreeMap;
use std::sync::Arc;

use mkp::cbga::{self, GaConfig, StopReason, WeightSource};
use mkp::instance::Instance;
use rayon::prelude::*;

use crate::parser::load_instances;
use crate::plan::{Algorithm, ExperimentPlan};

/// One run's raw results, persisted as one CSV row.
#[derive(Debug, Clone, PartialEq)]
pub struct RunRecord {
    pub instance: String,
    pub algorithm: Algorithm,
    pub seed: u64,
    pub best_value: i64,
    /// Percent shortfall against the best known value; None without one.
    pub gap: Option<f64>,
    pub evaluations: u64,
    pub generations: u64,
    pub randomizations: u64,
    pub seconds: f64,
    pub stop_reason: StopReason,
    pub weight_source: WeightSource,
}

/// Per-algorithm aggregate over the runs of one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct AlgoSummary {
    pub algorithm: Algorithm,
    pub mean_gap: Option<f64>,
    /// Best known value reached at least once across the runs.
    pub star: bool,
    pub mean_seconds: f64,
    pub mean_evaluations: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReportRow {
    pub instance: String,
    pub best_known: Option<i64>,
    pub algorithms: Vec<AlgoSummary>,
}

/// Final tally: how often each algorithm had the best mean gap (quality)
/// and the best mean time (speed). Ties award every tied algorithm;
/// instances without a best-known value participate in neither tally.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WinsRow {
    pub quality: Vec<u32>,
    pub time: Vec<u32>,
}

#[derive(Debug)]
pub struct ExperimentResult {
    pub records: Vec<RunRecord>,
    pub rows: Vec<ReportRow>,
    pub wins: WinsRow,
    /// Best-known value per instance after overrides, as used for gaps.
    pub best_known: BTreeMap<String, i64>,
}

pub fn gap_percent(best_known: i64, found: i64) -> f64 {
    100.0 * (best_known - found) as f64 / best_known as f64
}

/// Runs the full plan: every instance of every file, every algorithm,
/// `runs_per_instance` seeded runs each.
pub fn run_experiment(plan: &ExperimentPlan) -> anyhow::Result<ExperimentResult> {
    plan.validate()?;

    let mut instances: Vec<Arc<Instance>> = Vec::new();
    for path in &plan.instances {
        for inst in load_instances(path)? {
            instances.push(Arc::new(inst));
        }
    }

    let mut best_known: BTreeMap<String, i64> = BTreeMap::new();
    for inst in &instances {
        let value = plan
            .best_known_overrides
            .get(inst.name())
            .copied()
            .or(inst.best_known());
        if let Some(v) = value {
            best_known.insert(inst.name().to_string(), v);
        }
    }

    struct Job {
        inst: Arc<Instance>,
        algorithm: Algorithm,
        seed: u64,
        target: Option<i64>,
    }
    let mut jobs = Vec::new();
    for inst in &instances {
        let target = best_known.get(inst.name()).copied();
        for &algorithm in &plan.algorithms {
            for k in 0..plan.runs_per_instance {
                jobs.push(Job {
                    inst: Arc::clone(inst),
                    algorithm,
                    seed: plan.base_seed + k as u64,
                    target,
                });
            }
        }
    }

    let mut records = jobs
        .par_iter()
        .map(|job| -> anyhow::Result<RunRecord> {
            let cfg = GaConfig {
                population_size: plan.population_size,
                max_evaluations: plan.max_evaluations,
                operator: job.algorithm.operator(),
                decimals: job.algorithm.decimals(),
                seed: job.seed,
                target_value: job.target,
            };
            let stats = cbga::run(&job.inst, &cfg)?;
            Ok(RunRecord {
                instance: job.inst.name().to_string(),
                algorithm: job.algorithm,
                seed: job.seed,
                best_value: stats.best_value,
                gap: job.target.map(|bk| gap_percent(bk, stats.best_value)),
                evaluations: stats.evaluations,
                generations: stats.generations,
                randomizations: stats.randomizations,
                seconds: stats.wall_time.as_secs_f64(),
                stop_reason: stats.stop_reason,
                weight_source: stats.weight_source,
            })
        })
        .collect::<anyhow::Result<Vec<_>>>()?;

    // Deterministic merge order regardless of pool scheduling.
    records.sort_by(|a, b| {
        (a.instance.as_str(), a.algorithm, a.seed).cmp(&(b.instance.as_str(), b.algorithm, b.seed))
    });

    let instance_order: Vec<String> = {
        let mut names: Vec<String> = instances.iter().map(|i| i.name().to_string()).collect();
        names.sort();
        names
    };
    let (rows, wins) = aggregate(&records, &instance_order, &plan.algorithms, &best_known);
    Ok(ExperimentResult {
        records,
        rows,
        wins,
        best_known,
    })
}

/// Rebuilds report rows and the wins tally from raw records. Pure, so a
/// persisted raw CSV can always be re-aggregated.
pub fn aggregate(
    records: &[RunRecord],
    instance_order: &[String],
    algorithms: &[Algorithm],
    best_known: &BTreeMap<String, i64>,
) -> (Vec<ReportRow>, WinsRow) {
    let mut rows = Vec::new();
    for name in instance_order {
        let bk = best_known.get(name).copied();
        let mut summaries = Vec::with_capacity(algorithms.len());
        for &algorithm in algorithms {
            let runs: Vec<&RunRecord> = records
                .iter()
                .filter(|r| r.instance == *name && r.algorithm == algorithm)
                .collect();
            if runs.is_empty() {
                summaries.push(AlgoSummary {
                    algorithm,
                    mean_gap: None,
                    star: false,
                    mean_seconds: 0.0,
                    mean_evaluations: 0.0,
                });
                continue;
            }
            let count = runs.len() as f64;
            let mean_gap = bk.map(|_| {
                runs.iter().map(|r| r.gap.unwrap_or(0.0)).sum::<f64>() / count
            });
            let star = bk.is_some_and(|bk| runs.iter().any(|r| r.best_value >= bk));
            summaries.push(AlgoSummary {
                algorithm,
                mean_gap,
                star,
                mean_seconds: runs.iter().map(|r| r.seconds).sum::<f64>() / count,
                mean_evaluations: runs.iter().map(|r| r.evaluations as f64).sum::<f64>() / count,
            });
        }
        rows.push(ReportRow {
            instance: name.clone(),
            best_known: bk,
            algorithms: summaries,
        });
    }

    let mut wins = WinsRow {
        quality: vec![0; algorithms.len()],
        time: vec![0; algorithms.len()],
    };
    for row in &rows {
        if row.best_known.is_none() {
            continue;
        }
        let gaps: Vec<f64> = row
            .algorithms
            .iter()
            .map(|a| a.mean_gap.unwrap_or(f64::INFINITY))
            .collect();
        let best_gap = gaps.iter().cloned().fold(f64::INFINITY, f64::min);
        let times: Vec<f64> = row.algorithms.iter().map(|a| a.mean_seconds).collect();
        let best_time = times.iter().cloned().fold(f64::INFINITY, f64::min);
        for (idx, (&g, &t)) in gaps.iter().zip(&times).enumerate() {
            if g == best_gap {
                wins.quality[idx] += 1;
            }
            if t == best_time {
                wins.time[idx] += 1;
            }
        }
    }
    (rows, wins)
}
