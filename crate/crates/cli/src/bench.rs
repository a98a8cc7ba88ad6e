use std::path::PathBuf;

use serde_json::json;

use sdou_core::bench::{
    builtin_plan, emit_scaling, emit_skipped, emit_table, run_benchmark_with, BenchPlan, BUILTIN_PLANS,
};
use sdou_core::Execution;

use crate::config::{read_json, resolve_seed};
use crate::error::{CliError, CliResult};
use crate::meta;

#[derive(clap::Args, Debug)]
pub struct Args {
    /// JSON benchmark plan.
    #[arg(long, value_name = "FILE", conflicts_with = "builtin")]
    pub plan: Option<PathBuf>,
    /// Built-in plan: one-step or trajectory.
    #[arg(long)]
    pub builtin: Option<String>,
    /// Directory for bench_table.csv, bench_scaling.csv and bench_skipped.csv.
    #[arg(long, short = 'o', value_name = "DIR")]
    pub out_dir: PathBuf,
    #[arg(long)]
    pub repetitions: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// Replace every case's sample sizes, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub n_paths: Option<Vec<usize>>,
    /// Execution modes, comma separated (sequential, parallel).
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub modes: Option<Vec<String>>,
    #[arg(long, short = 'q')]
    pub quiet: bool,
}

pub fn run(args: &Args) -> CliResult<()> {
    let (mut plan, file_seed) = load_plan(args)?;
    if let Some(r) = args.repetitions {
        plan.repetitions = r;
    }
    if plan.repetitions == 0 {
        return Err(CliError::Config("repetitions must be at least 1".into()));
    }
    let (seed, seed_source) = resolve_seed(args.seed, file_seed)?;
    plan.seed = seed;
    if let Some(n) = &args.n_paths {
        for case in &mut plan.cases {
            case.n_paths = n.clone();
        }
    }
    if let Some(modes) = &args.modes {
        plan.modes = modes
            .iter()
            .map(|m| m.parse::<Execution>())
            .collect::<Result<_, _>>()?;
    }
    std::fs::create_dir_all(&args.out_dir).map_err(CliError::io(&args.out_dir))?;

    let quiet = args.quiet;
    let outcome = run_benchmark_with(&plan, |r| {
        if !quiet {
            eprintln!(
                "{:<8} {:<12} {:<10} N_S={:<9} {:.4e} s oracle_ok={}",
                r.process.name(),
                r.algorithm.name(),
                r.mode.name(),
                r.n_paths,
                r.wall_time_s,
                r.oracle_ok
            );
        }
    })?;
    let files = [
        ("bench_table.csv", emit_table(&outcome.records)?),
        ("bench_scaling.csv", emit_scaling(&outcome.records)?),
        ("bench_skipped.csv", emit_skipped(&outcome.skipped)?),
    ];
    let mut m = meta::base("bench");
    m.insert("plan".into(), json!(plan));
    m.insert("seed".into(), json!(seed));
    m.insert("seed_source".into(), json!(seed_source));
    m.insert("timed_region".into(), json!("fill_terminals over preallocated output; warm-up run excluded; median of repetitions"));
    for (name, text) in &files {
        let path = args.out_dir.join(name);
        std::fs::write(&path, text).map_err(CliError::io(&path))?;
        let mut mm = m.clone();
        mm.insert("output".into(), json!(name));
        meta::write_sidecar(&path, mm)?;
    }
    for sk in &outcome.skipped {
        eprintln!("skipped {} {}: {}", sk.process.name(), sk.algorithm, sk.reason);
    }
    println!(
        "{} records written to {}",
        outcome.records.len(),
        args.out_dir.display()
    );
    if outcome.all_oracles_ok() {
        Ok(())
    } else {
        let bad: Vec<String> = outcome
            .records
            .iter()
            .filter(|r| !r.oracle_ok)
            .map(|r| format!("{}/{}/N_S={}", r.process.name(), r.algorithm, r.n_paths))
            .collect();
        Err(CliError::Failed(format!("oracle check failed for {}", bad.join(", "))))
    }
}

fn load_plan(args: &Args) -> CliResult<(BenchPlan, Option<u64>)> {
    if let Some(path) = &args.plan {
        let doc = read_json(path)?;
        let seed = doc.get("seed").and_then(serde_json::Value::as_u64);
        let plan = serde_json::from_value(serde_json::Value::Object(doc))
            .map_err(|e| CliError::Config(format!("{}: invalid plan: {e}", path.display())))?;
        return Ok((plan, seed));
    }
    let name = args.builtin.as_deref().unwrap_or(BUILTIN_PLANS[0]);
    let plan = builtin_plan(name).ok_or_else(|| {
        CliError::Config(format!("unknown built-in plan '{name}' (choose from {})", BUILTIN_PLANS.join(", ")))
    })?;
    Ok((plan, None))
}
