//! Command line front end: single runs, benchmark sweeps, efficiency dumps
//! and exact-oracle audits.

use std::io::Write;
use std::path::PathBuf;

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use mkp::cbga::{self, GaConfig, Operator};
use mkp::efficiency::dual_or_uniform_efficiencies;
use mkp::instance::{Instance, Solution};
use mkp::lp::solve_lp_relaxation;
use mkp::oracle::{enumerate_optimum, lp_bound_check, MAX_ENUMERATION_ITEMS};
use mkp::repair::{heuristic_repair, is_maximal};

use mkp_bench::effdump::{efficiency_rows, write_efficiency_csv};
use mkp_bench::harness::{gap_percent, run_experiment, RunRecord};
use mkp_bench::parser::load_instances;
use mkp_bench::plan::{load_plan, Algorithm, ExperimentPlan};
use mkp_bench::report::{raw_fields, write_raw_csv, write_summary_csv, write_summary_markdown, RAW_HEADER};

#[derive(Parser)]
#[command(
    name = "mkp-bench",
    about = "Multidimensional knapsack solver and benchmark harness",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one algorithm on one instance and print the raw record as CSV.
    Solve(SolveArgs),
    /// Run an experiment plan (instances x algorithms x seeded runs) and
    /// write raw/summary reports.
    Bench(BenchArgs),
    /// Dump scaled efficiencies (and groups, when --decimals is given) as CSV.
    DumpEff(DumpEffArgs),
    /// Audit a small instance against the exact enumeration oracle.
    Verify(VerifyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum OperatorArg {
    None,
    Swap,
    Shuffle,
}

impl From<OperatorArg> for Operator {
    fn from(value: OperatorArg) -> Self {
        match value {
            OperatorArg::None => Operator::None,
            OperatorArg::Swap => Operator::Swap,
            OperatorArg::Shuffle => Operator::Shuffle,
        }
    }
}

#[derive(Args)]
struct SolveArgs {
    /// Instance file (single- or multi-instance layout).
    instance: PathBuf,
    /// Which instance of a multi-instance file to solve, 0-based.
    #[arg(long, default_value_t = 0)]
    index: usize,
    #[arg(long, value_enum, default_value_t = OperatorArg::None)]
    operator: OperatorArg,
    /// Rounding decimals for the efficiency groups.
    #[arg(long, default_value_t = 1)]
    decimals: u32,
    #[arg(long, default_value_t = 100)]
    pop_size: usize,
    #[arg(long, default_value_t = 1_000_000)]
    max_evals: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Stop once this objective value is reached. Defaults to the
    /// instance's best-known value when the file carries one.
    #[arg(long)]
    target: Option<i64>,
    /// Print a per-generation trace to stderr.
    #[arg(long)]
    trace: bool,
}

#[derive(Args)]
struct BenchArgs {
    /// Plan file; command line flags below override its entries.
    #[arg(long)]
    plan: Option<PathBuf>,
    /// Instance file, repeatable.
    #[arg(long = "instance")]
    instances: Vec<PathBuf>,
    /// Comma-separated subset of cbga, sw_d1, sw_d2, sh_d1, sh_d2.
    #[arg(long, value_delimiter = ',')]
    algorithms: Vec<String>,
    #[arg(long)]
    runs: Option<u32>,
    #[arg(long)]
    max_evals: Option<u64>,
    #[arg(long)]
    pop_size: Option<usize>,
    #[arg(long)]
    base_seed: Option<u64>,
    /// Output directory for raw.csv, summary.csv and summary.md.
    #[arg(long, default_value = "bench_out")]
    out: PathBuf,
    /// Worker threads (0 = rayon default).
    #[arg(long, default_value_t = 0)]
    jobs: usize,
}

#[derive(Args)]
struct DumpEffArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Rounding decimals; omit for unrounded output without groups.
    #[arg(long)]
    decimals: Option<u32>,
    /// Write to a file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    instance: PathBuf,
    #[arg(long, default_value_t = 0)]
    index: usize,
    /// Random start vectors pushed through the repair audit.
    #[arg(long, default_value_t = 200)]
    samples: u32,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

fn main() -> anyhow::Result<()> {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match Cli::parse().command {
        Command::Solve(args) => solve(args),
        Command::Bench(args) => bench(args),
        Command::DumpEff(args) => dump_eff(args),
        Command::Verify(args) => verify(args),
    }
}

fn load_one(path: &std::path::Path, index: usize) -> anyhow::Result<Instance> {
    let mut instances = load_instances(path)?;
    if index >= instances.len() {
        bail!(
            "{} holds {} instance(s), index {index} is out of range",
            path.display(),
            instances.len()
        );
    }
    Ok(instances.swap_remove(index))
}

fn solve(args: SolveArgs) -> anyhow::Result<()> {
    let inst = load_one(&args.instance, args.index)?;
    let target = args.target.or(inst.best_known());
    let cfg = GaConfig {
        population_size: args.pop_size,
        max_evaluations: args.max_evals,
        operator: args.operator.into(),
        decimals: args.decimals,
        seed: args.seed,
        target_value: target,
    };
    let stats = if args.trace {
        cbga::run_with_progress(&inst, &cfg, |p| {
            eprintln!(
                "gen={} best={} improvements={}",
                p.generation, p.best_value, p.improvements
            );
        })?
    } else {
        cbga::run(&inst, &cfg)?
    };

    let algorithm = match (cfg.operator, cfg.decimals) {
        (Operator::None, _) => Algorithm::Cbga,
        (Operator::Swap, 2) => Algorithm::SwD2,
        (Operator::Swap, _) => Algorithm::SwD1,
        (Operator::Shuffle, 2) => Algorithm::ShD2,
        (Operator::Shuffle, _) => Algorithm::ShD1,
    };
    let record = RunRecord {
        instance: inst.name().to_string(),
        algorithm,
        seed: cfg.seed,
        best_value: stats.best_value,
        gap: target.map(|bk| gap_percent(bk, stats.best_value)),
        evaluations: stats.evaluations,
        generations: stats.generations,
        randomizations: stats.randomizations,
        seconds: stats.wall_time.as_secs_f64(),
        stop_reason: stats.stop_reason,
        weight_source: stats.weight_source,
    };
    let mut out = std::io::stdout().lock();
    writeln!(out, "{}", RAW_HEADER.join(","))?;
    writeln!(out, "{}", raw_fields(&record).join(","))?;
    Ok(())
}

fn build_plan(args: &BenchArgs) -> anyhow::Result<ExperimentPlan> {
    let mut plan = match &args.plan {
        Some(path) => load_plan(path)?,
        None => ExperimentPlan::default(),
    };
    if !args.instances.is_empty() {
        plan.instances.extend(args.instances.iter().cloned());
    }
    if !args.algorithms.is_empty() {
        let mut algos = Vec::new();
        for name in &args.algorithms {
            let algo = Algorithm::parse(name)
                .with_context(|| format!("unknown algorithm {name:?}"))?;
            if !algos.contains(&algo) {
                algos.push(algo);
            }
        }
        plan.algorithms = algos;
    }
    if let Some(runs) = args.runs {
        plan.runs_per_instance = runs;
    }
    if let Some(me) = args.max_evals {
        plan.max_evaluations = me;
    }
    if let Some(ps) = args.pop_size {
        plan.population_size = ps;
    }
    if let Some(bs) = args.base_seed {
        plan.base_seed = bs;
    }
    Ok(plan)
}

fn bench(args: BenchArgs) -> anyhow::Result<()> {
    if args.jobs > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(args.jobs)
            .build_global()
            .context("worker pool setup failed")?;
    }
    let plan = build_plan(&args)?;
    let result = run_experiment(&plan)?;

    std::fs::create_dir_all(&args.out)
        .with_context(|| format!("cannot create {}", args.out.display()))?;
    let raw_path = args.out.join("raw.csv");
    write_raw_csv(&result.records, std::fs::File::create(&raw_path)?)?;
    let summary_csv = args.out.join("summary.csv");
    write_summary_csv(
        &result.rows,
        &result.wins,
        &plan.algorithms,
        std::fs::File::create(&summary_csv)?,
    )?;
    let summary_md = args.out.join("summary.md");
    write_summary_markdown(
        &result.rows,
        &result.wins,
        &plan.algorithms,
        std::fs::File::create(&summary_md)?,
    )?;

    let mut stdout = std::io::stdout().lock();
    write_summary_markdown(&result.rows, &result.wins, &plan.algorithms, &mut stdout)?;
    writeln!(
        stdout,
        "\n{} runs -> {}, {}, {}",
        result.records.len(),
        raw_path.display(),
        summary_csv.display(),
        summary_md.display()
    )?;
    Ok(())
}

fn dump_eff(args: DumpEffArgs) -> anyhow::Result<()> {
    let inst = load_one(&args.instance, args.index)?;
    let (rows, source) = efficiency_rows(&inst, args.decimals)?;
    log::info!("efficiency weights: {}", source.as_str());
    match &args.out {
        Some(path) => write_efficiency_csv(&rows, std::fs::File::create(path)?)?,
        None => write_efficiency_csv(&rows, std::io::stdout().lock())?,
    }
    Ok(())
}

fn verify(args: VerifyArgs) -> anyhow::Result<()> {
    let inst = load_one(&args.instance, args.index)?;
    if inst.n() > MAX_ENUMERATION_ITEMS {
        bail!(
            "verify enumerates 2^n selections and accepts at most {MAX_ENUMERATION_ITEMS} \
             items; {} has {}",
            inst.name(),
            inst.n()
        );
    }
    fn check(failures: &mut u32, label: &str, ok: bool) {
        println!("{} {label}", if ok { "PASS" } else { "FAIL" });
        if !ok {
            *failures += 1;
        }
    }
    let mut failures = 0u32;

    let (optimum, optimal_bits) = enumerate_optimum(&inst)?;
    println!(
        "instance {}: n={} m={} enumerated optimum {}",
        inst.name(),
        inst.n(),
        inst.m(),
        optimum
    );
    let optimal = Solution::from_bits(&inst, optimal_bits);
    check(&mut failures, "enumerated optimum is feasible", optimal.is_feasible(&inst));
    check(
        &mut failures,
        "enumerated optimum matches its own objective",
        optimal.profit() == optimum,
    );

    let lp = solve_lp_relaxation(&inst);
    check(&mut failures, "lp relaxation solved to optimality", lp.is_optimal());
    if lp.is_optimal() {
        println!(
            "lp objective {:.6}, duals {:?}",
            lp.primal_objective, lp.duals
        );
        check(
            &mut failures,
            "lp objective upper-bounds the integer optimum",
            lp_bound_check(&inst, &lp)?,
        );
    }

    let (eff, source) = dual_or_uniform_efficiencies(&inst)?;
    println!("efficiency weights: {}", source.as_str());
    let ordering = mkp::efficiency::dual_ordering(&eff);
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut repair_ok = true;
    for _ in 0..args.samples {
        let bits: Vec<bool> = (0..inst.n()).map(|_| rng.gen_bool(0.5)).collect();
        let mut sol = Solution::from_bits(&inst, bits);
        heuristic_repair(&mut sol, &ordering, &inst);
        let mut twice = sol.clone();
        heuristic_repair(&mut twice, &ordering, &inst);
        repair_ok &= sol.is_feasible(&inst)
            && is_maximal(&sol, &inst)
            && twice == sol
            && sol.profit() <= optimum;
    }
    check(
        &mut failures,
        &format!(
            "{} repaired samples feasible, maximal, idempotent, below optimum",
            args.samples
        ),
        repair_ok,
    );

    if failures > 0 {
        bail!("{failures} audit check(s) failed");
    }
    Ok(())
}
