//! Multidimensional knapsack solver library.
//!
//! The pieces, bottom up:
//!
//! - [`instance`]: integral instances and solutions with incremental
//!   profit/usage caches.
//! - [`lp`]: bounded-variable revised simplex for the LP relaxation; its
//!   capacity-row duals weight the item efficiencies.
//! - [`efficiency`]: dual efficiencies and the non-increasing item ordering.
//! - [`ordering`]: efficiency groups by rounding, plus the rg-swap and
//!   rg-shuffle randomization operators.
//! - [`repair`]: deterministic drop/add feasibility repair along the
//!   ordering.
//! - [`cbga`]: the steady-state GA, with optional stall-triggered ordering
//!   randomization.
//! - [`oracle`]: exhaustive enumeration for small instances, the ground
//!   truth in tests and audits.

pub mod cbga;
pub mod efficiency;
pub mod instance;
pub mod lp;
pub mod oracle;
pub mod ordering;
pub mod repair;

pub use cbga::{
    run, run_with_progress, GaConfig, GaError, GenerationProgress, Operator, RunStats,
    StopReason, WeightSource,
};
pub use efficiency::{
    compute_efficiencies, dual_ordering, dual_or_uniform_efficiencies, uniform_weights,
    EfficiencyVector,
};
pub use instance::{Instance, InstanceError, Solution};
pub use lp::{solve_lp_relaxation, LpSolution, LpStatus};
pub use oracle::{enumerate_optimum, lp_bound_check, OracleError};
pub use ordering::{
    get_efficiency_groups, rg_shuffle, rg_swap, EfficiencyGroups, EfficiencyOrdering,
};
pub use repair::{heuristic_repair, repair_population};
