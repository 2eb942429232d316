//! Benchmark harness around the `mkp` solver library: instance file
//! parsing, experiment plans, seeded multi-run execution, gap/time report
//! writers, and efficiency dumps.

pub mod effdump;
pub mod harness;
pub mod parser;
pub mod plan;
pub mod report;
