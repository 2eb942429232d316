//! Experiment plans: which instances, which algorithm variants, how many
//! seeded runs, and under what budget.
//!
//! Plan files are plain `key = value` text with `#` comments. Recognized
//! keys: `instance` (repeatable), `algorithms` (comma list), `runs`,
//! `max_evals`, `pop_size`, `base_seed`, and `best_known.<name>` overrides.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mkp::cbga::Operator;
use thiserror::Error;

/// The five compared variants: the plain algorithm plus swap/shuffle at
/// rounding depths 1 and 2.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Algorithm {
    Cbga,
    SwD1,
    SwD2,
    ShD1,
    ShD2,
}

impl Algorithm {
    pub const ALL: [Algorithm; 5] = [
        Algorithm::Cbga,
        Algorithm::SwD1,
        Algorithm::SwD2,
        Algorithm::ShD1,
        Algorithm::ShD2,
    ];

    pub fn label(&self) -> &'static str {
        match self {
            Algorithm::Cbga => "CBGA",
            Algorithm::SwD1 => "Sw_d1",
            Algorithm::SwD2 => "Sw_d2",
            Algorithm::ShD1 => "Sh_d1",
            Algorithm::ShD2 => "Sh_d2",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "cbga" => Some(Algorithm::Cbga),
            "sw_d1" => Some(Algorithm::SwD1),
            "sw_d2" => Some(Algorithm::SwD2),
            "sh_d1" => Some(Algorithm::ShD1),
            "sh_d2" => Some(Algorithm::ShD2),
            _ => None,
        }
    }

    pub fn operator(&self) -> Operator {
        match self {
            Algorithm::Cbga => Operator::None,
            Algorithm::SwD1 | Algorithm::SwD2 => Operator::Swap,
            Algorithm::ShD1 | Algorithm::ShD2 => Operator::Shuffle,
        }
    }

    pub fn decimals(&self) -> u32 {
        match self {
            Algorithm::SwD2 | Algorithm::ShD2 => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone)]
pub struct ExperimentPlan {
    pub instances: Vec<PathBuf>,
    pub algorithms: Vec<Algorithm>,
    pub runs_per_instance: u32,
    pub max_evaluations: u64,
    pub population_size: usize,
    /// Run k of every (instance, algorithm) pair uses seed `base_seed + k`.
    pub base_seed: u64,
    pub best_known_overrides: BTreeMap<String, i64>,
}

impl Default for ExperimentPlan {
    fn default() -> Self {
        Self {
            instances: Vec::new(),
            algorithms: Algorithm::ALL.to_vec(),
            runs_per_instance: 30,
            max_evaluations: 1_000_000,
            population_size: 100,
            base_seed: 1,
            best_known_overrides: BTreeMap::new(),
        }
    }
}

impl ExperimentPlan {
    pub fn validate(&self) -> Result<(), PlanError> {
        if self.instances.is_empty() {
            return Err(PlanError::NoInstances);
        }
        if self.algorithms.is_empty() {
            return Err(PlanError::NoAlgorithms);
        }
        if self.runs_per_instance < 1 {
            return Err(PlanError::NoRuns);
        }
        Ok(())
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PlanError {
    #[error("plan lists no instance files")]
    NoInstances,
    #[error("plan lists no algorithms")]
    NoAlgorithms,
    #[error("runs_per_instance must be at least 1")]
    NoRuns,
    #[error("line {line}: expected `key = value`, got {text:?}")]
    MalformedLine { line: usize, text: String },
    #[error("line {line}: unknown key {key:?}")]
    UnknownKey { line: usize, key: String },
    #[error("line {line}: unknown algorithm {name:?} (expected cbga, sw_d1, sw_d2, sh_d1, sh_d2)")]
    UnknownAlgorithm { line: usize, name: String },
    #[error("line {line}: invalid value for {key}: {value:?}")]
    InvalidValue {
        line: usize,
        key: String,
        value: String,
    },
}

/// Parses a plan file into a plan starting from default settings.
pub fn parse_plan(text: &str) -> Result<ExperimentPlan, PlanError> {
    let mut plan = ExperimentPlan::default();

    for (idx, raw_line) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = match raw_line.find('#') {
            Some(cut) => &raw_line[..cut],
            None => raw_line,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(PlanError::MalformedLine {
                line: line_no,
                text: line.to_string(),
            });
        };
        let key = key.trim();
        let value = value.trim();
        let invalid = |key: &str| PlanError::InvalidValue {
            line: line_no,
            key: key.to_string(),
            value: value.to_string(),
        };
        match key {
            "instance" => plan.instances.push(PathBuf::from(value)),
            "algorithms" => {
                let mut algos = Vec::new();
                for name in value.split(',') {
                    let algo = Algorithm::parse(name).ok_or_else(|| {
                        PlanError::UnknownAlgorithm {
                            line: line_no,
                            name: name.trim().to_string(),
                        }
                    })?;
                    if !algos.contains(&algo) {
                        algos.push(algo);
                    }
                }
                plan.algorithms = algos;
            }
            "runs" => plan.runs_per_instance = value.parse().map_err(|_| invalid(key))?,
            "max_evals" => plan.max_evaluations = value.parse().map_err(|_| invalid(key))?,
            "pop_size" => plan.population_size = value.parse().map_err(|_| invalid(key))?,
            "base_seed" => plan.base_seed = value.parse().map_err(|_| invalid(key))?,
            _ => {
                if let Some(name) = key.strip_prefix("best_known.") {
                    let v: i64 = value.parse().map_err(|_| invalid(key))?;
                    if v <= 0 {
                        return Err(invalid(key));
                    }
                    plan.best_known_overrides.insert(name.to_string(), v);
                } else {
                    return Err(PlanError::UnknownKey {
                        line: line_no,
                        key: key.to_string(),
                    });
                }
            }
        }
    }
    Ok(plan)
}

pub fn load_plan(path: &Path) -> anyhow::Result<ExperimentPlan> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow::anyhow!("cannot read {}: {e}", path.display()))?;
    Ok(parse_plan(&text)?)
}
