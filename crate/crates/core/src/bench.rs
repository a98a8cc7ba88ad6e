//! Timing and accuracy comparison of the simulation algorithms.
//!
//! The timed region is [`fill_terminals`] into a preallocated buffer: the
//! per-path stream setup (a counter reset) is included, while simulator
//! construction, statistics and output are not. Each configuration runs once
//! untimed, then `repetitions` timed runs whose median is reported.

use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::scenario::{Algorithm, GridSpec, ProcessKind, ProcessSpec};
use crate::sim::{fill_terminals, Execution, SimOptions};
use crate::validation::summarize;

/// Oracle tolerance for the statistical columns, in standard errors.
pub const ORACLE_TOLERANCE_SE: f64 = 4.0;

pub const DEFAULT_REPETITIONS: usize = 5;

/// Sample counts `10^4 * 2^j` for `j = 0..=8`.
pub fn doubling_sample_sizes() -> Vec<usize> {
    (0..=8).map(|j| 10_000usize << j).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchCase {
    #[serde(flatten)]
    pub process: ProcessSpec,
    /// Defaults to every algorithm of the process family.
    #[serde(default)]
    pub algorithms: Option<Vec<Algorithm>>,
    pub grid: GridSpec,
    pub n_paths: Vec<usize>,
}

fn default_repetitions() -> usize {
    DEFAULT_REPETITIONS
}

fn default_modes() -> Vec<Execution> {
    vec![Execution::Sequential]
}

fn default_seed() -> u64 {
    20_210_401
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchPlan {
    pub name: String,
    pub cases: Vec<BenchCase>,
    #[serde(default = "default_repetitions")]
    pub repetitions: usize,
    #[serde(default = "default_seed")]
    pub seed: u64,
    #[serde(default = "default_modes")]
    pub modes: Vec<Execution>,
    #[serde(default)]
    pub options: SimOptions,
}

pub const BUILTIN_PLANS: [&str; 2] = ["one-step", "trajectory"];

/// The two experiments: one step of `1/365` at `(36, 10, 3, 0)`, and a
/// four-step trajectory of step `1/4` at `(0.5, 1, 1, 10)`, each for the GOU
/// and the symmetric BGOU process over the doubling sample sizes.
pub fn builtin_plan(name: &str) -> Option<BenchPlan> {
    let (k, lambda, beta, x0, grid) = match name {
        "one-step" => (
            36.0,
            10.0,
            3.0,
            0.0,
            GridSpec::Uniform {
                t_end: 1.0 / 365.0,
                n_steps: 1,
            },
        ),
        "trajectory" => (
            0.5,
            1.0,
            1.0,
            10.0,
            GridSpec::Uniform {
                t_end: 1.0,
                n_steps: 4,
            },
        ),
        _ => return None,
    };
    let gou = ProcessSpec::Gou(crate::gou::GouParams {
        k,
        lambda,
        beta,
        x0,
    });
    let bgou = ProcessSpec::BgouSym { k, lambda, beta, x0 };
    let cases = [gou, bgou]
        .into_iter()
        .map(|process| BenchCase {
            process,
            algorithms: None,
            grid: grid.clone(),
            n_paths: doubling_sample_sizes(),
        })
        .collect();
    Some(BenchPlan {
        name: name.to_string(),
        cases,
        repetitions: DEFAULT_REPETITIONS,
        seed: default_seed(),
        modes: default_modes(),
        options: SimOptions::default(),
    })
}

/// One row of the comparison table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BenchRecord {
    pub algorithm: Algorithm,
    #[serde(rename = "N_S")]
    pub n_paths: usize,
    /// Median wall time of the timed repetitions.
    pub wall_time_s: f64,
    /// `wall_time_s` over that of the reference exact sampler of the same
    /// process, grid, sample size and mode.
    pub ratio: Option<f64>,
    pub mean: f64,
    pub var: f64,
    pub skew: f64,
    pub kurt: f64,
    /// `(estimate - closed form) / s.e.`
    pub d_mean: f64,
    pub d_var: f64,
    pub d_skew: f64,
    pub d_kurt: f64,
    pub process: ProcessKind,
    pub mode: Execution,
    pub n_steps: usize,
    pub t_end: f64,
    pub k: f64,
    pub lambda1: f64,
    pub beta1: f64,
    pub lambda2: Option<f64>,
    pub beta2: Option<f64>,
    pub x0: f64,
    pub se_mean: f64,
    pub se_var: f64,
    pub se_skew: f64,
    pub se_kurt: f64,
    /// Every `|d_*| <= 4`.
    pub oracle_ok: bool,
    pub seed: u64,
    pub repetitions: usize,
}

/// An (algorithm, process) pair whose preconditions fail.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkippedRun {
    pub process: ProcessKind,
    pub algorithm: Algorithm,
    pub reason: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct BenchOutcome {
    pub records: Vec<BenchRecord>,
    pub skipped: Vec<SkippedRun>,
}

impl BenchOutcome {
    pub fn all_oracles_ok(&self) -> bool {
        self.records.iter().all(|r| r.oracle_ok)
    }
}

pub fn run_benchmark(plan: &BenchPlan) -> Result<BenchOutcome> {
    run_benchmark_with(plan, |_| {})
}

/// As [`run_benchmark`], calling `progress` after each record is measured.
pub fn run_benchmark_with<F: FnMut(&BenchRecord)>(plan: &BenchPlan, mut progress: F) -> Result<BenchOutcome> {
    if plan.cases.is_empty() {
        return Err(Error::Config(format!("benchmark plan '{}' has no cases", plan.name)));
    }
    if plan.modes.is_empty() {
        return Err(Error::Config("benchmark plan lists no execution modes".into()));
    }
    let repetitions = plan.repetitions.max(1);
    let mut out = BenchOutcome::default();
    for case in &plan.cases {
        case.process.validate()?;
        let grid = case.grid.to_grid()?;
        let horizon = grid.end() - grid.start();
        let oracle = case.process.moments_at(horizon)?;
        let flat = case.process.flat()?;
        let kind = case.process.kind();
        let algorithms = case
            .algorithms
            .clone()
            .unwrap_or_else(|| case.process.algorithms());
        let first = out.records.len();
        for alg in algorithms {
            let sim = match case.process.simulator(alg, grid.clone(), &plan.options) {
                Ok(s) => s,
                Err(e @ Error::Config(_)) => return Err(e),
                Err(e) => {
                    out.skipped.push(SkippedRun {
                        process: kind,
                        algorithm: alg,
                        reason: e.to_string(),
                    });
                    continue;
                }
            };
            for &mode in &plan.modes {
                for &n in &case.n_paths {
                    if n < 2 {
                        return Err(Error::Config(format!("benchmark sample size must be at least 2 (got {n})")));
                    }
                    let mut buf = vec![0.0; n];
                    fill_terminals(&sim, plan.seed, &mut buf, mode);
                    let mut times: Vec<f64> = (0..repetitions)
                        .map(|_| {
                            let start = Instant::now();
                            fill_terminals(&sim, plan.seed, &mut buf, mode);
                            start.elapsed().as_secs_f64()
                        })
                        .collect();
                    times.sort_by(f64::total_cmp);
                    let wall = times[times.len() / 2].max(f64::MIN_POSITIVE);
                    let st = summarize(&buf)?;
                    let d = st.deltas(&oracle);
                    let se = st.standard_errors;
                    let record = BenchRecord {
                        algorithm: alg,
                        n_paths: n,
                        wall_time_s: wall,
                        ratio: None,
                        mean: st.mean,
                        var: st.variance,
                        skew: st.skewness,
                        kurt: st.kurtosis,
                        d_mean: d[0],
                        d_var: d[1],
                        d_skew: d[2],
                        d_kurt: d[3],
                        process: kind,
                        mode,
                        n_steps: grid.n_steps(),
                        t_end: grid.end(),
                        k: flat.k,
                        lambda1: flat.lambda1,
                        beta1: flat.beta1,
                        lambda2: flat.lambda2,
                        beta2: flat.beta2,
                        x0: flat.x0,
                        se_mean: se[0],
                        se_var: se[1],
                        se_skew: se[2],
                        se_kurt: se[3],
                        oracle_ok: d.iter().all(|x| x.abs() <= ORACLE_TOLERANCE_SE),
                        seed: plan.seed,
                        repetitions,
                    };
                    progress(&record);
                    out.records.push(record);
                }
            }
        }
        fill_ratios(&mut out.records[first..], case.process.reference_algorithm());
    }
    Ok(out)
}

fn fill_ratios(records: &mut [BenchRecord], reference: Algorithm) {
    let refs: Vec<(Execution, usize, f64)> = records
        .iter()
        .filter(|r| r.algorithm == reference)
        .map(|r| (r.mode, r.n_paths, r.wall_time_s))
        .collect();
    for r in records.iter_mut() {
        r.ratio = refs
            .iter()
            .find(|(m, n, _)| *m == r.mode && *n == r.n_paths)
            .map(|(_, _, t)| r.wall_time_s / t);
    }
}

fn write_csv<T: Serialize>(rows: &[T]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| Error::Input(format!("csv: {e}")))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Input(format!("csv: {e}")))?;
    String::from_utf8(bytes).map_err(|e| Error::Input(format!("csv: {e}")))
}

/// Comparison table, one CSV row per record.
pub fn emit_table(records: &[BenchRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Input("no benchmark records to emit".into()));
    }
    write_csv(records)
}

pub fn parse_table(csv_text: &str) -> Result<Vec<BenchRecord>> {
    csv::Reader::from_reader(csv_text.as_bytes())
        .deserialize()
        .map(|r| r.map_err(|e| Error::Input(format!("csv: {e}"))))
        .collect()
}

#[derive(Debug, Serialize)]
struct ScalingRow {
    process: ProcessKind,
    mode: Execution,
    algorithm: Algorithm,
    #[serde(rename = "N_S")]
    n_paths: usize,
    wall_time_s: f64,
    ratio: Option<f64>,
}

/// Sample size against wall time and ratio, one row per
/// (process, mode, algorithm, N_S), sorted for plotting.
pub fn emit_scaling(records: &[BenchRecord]) -> Result<String> {
    if records.is_empty() {
        return Err(Error::Input("no benchmark records to emit".into()));
    }
    let mut rows: Vec<ScalingRow> = records
        .iter()
        .map(|r| ScalingRow {
            process: r.process,
            mode: r.mode,
            algorithm: r.algorithm,
            n_paths: r.n_paths,
            wall_time_s: r.wall_time_s,
            ratio: r.ratio,
        })
        .collect();
    rows.sort_by(|a, b| {
        (a.process.name(), a.mode.name(), a.algorithm.name(), a.n_paths)
            .cmp(&(b.process.name(), b.mode.name(), b.algorithm.name(), b.n_paths))
    });
    write_csv(&rows)
}

pub fn emit_skipped(skipped: &[SkippedRun]) -> Result<String> {
    if skipped.is_empty() {
        return Ok("process,algorithm,reason\n".to_string());
    }
    write_csv(skipped)
}
