use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;

use sdou_core::bench::ORACLE_TOLERANCE_SE;
use sdou_core::law::AtomAt;
use sdou_core::validation::{chf_check, gof_mixed, ks_two_sample, linspace, summarize, GofOptions};
use sdou_core::{sample_terminals, Algorithm, Error, ProcessSpec};

use crate::config::{Scenario, ScenarioArgs};
use crate::density::default_truncation;
use crate::error::{CliError, CliResult};
use crate::meta;

const DEFAULT_PATHS: usize = 200_000;
const CHF_POINTS: usize = 41;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Multiply the oracle's jump rates by this factor (negative control).
    #[arg(long)]
    pub corrupt_beta: Option<f64>,
    /// Family-wise level shared by the KS and goodness-of-fit tests.
    #[arg(long, default_value_t = 0.01)]
    pub level: f64,
    /// CF checked on 41 points of [-u_max, u_max].
    #[arg(long, default_value_t = 20.0)]
    pub u_max: f64,
    /// JSON report file.
    #[arg(long, value_name = "FILE")]
    pub report: Option<PathBuf>,
}

#[derive(Debug, Serialize)]
struct TestResult {
    name: String,
    algorithm: Algorithm,
    pass: bool,
    detail: serde_json::Value,
}

#[derive(Debug, Serialize)]
struct Skipped {
    algorithm: Algorithm,
    reason: String,
}

pub fn run(args: &Args) -> CliResult<()> {
    let s = Scenario::load(&args.scenario)?;
    if !(args.level > 0.0 && args.level < 1.0) {
        return Err(CliError::Config(format!("level must lie in (0, 1) (got {})", args.level)));
    }
    if let Some(f) = args.corrupt_beta {
        if !(f > 0.0 && f.is_finite()) {
            return Err(CliError::Config(format!("corrupt-beta factor must be positive (got {f})")));
        }
    }
    let process = *s.process();
    let oracle = args.corrupt_beta.map_or(process, |f| process.with_rates_scaled(f));
    let grid = s.grid()?;
    let horizon = grid.end() - grid.start();
    let n = s.config.n_paths.unwrap_or(DEFAULT_PATHS);
    if n < 2 {
        return Err(CliError::Config("validation needs n_paths >= 2".into()));
    }
    let x0 = process.x0();
    let reference = process.reference_algorithm();
    let all = process.algorithms();
    let chosen: Vec<Algorithm> = match s.config.algorithm {
        Some(a) if a == reference => vec![a],
        Some(a) => vec![reference, a],
        None => all.clone(),
    };

    // Samples first, so the number of level-controlled tests is known.
    let mut runs = Vec::new();
    let mut skipped = Vec::new();
    for alg in chosen {
        match process.simulator(alg, grid.clone(), &s.sim_options()) {
            Ok(sim) => {
                let idx = all.iter().position(|a| *a == alg).unwrap_or(0) as u64;
                let x = sample_terminals(&sim, s.seed.wrapping_add(idx), n, s.execution());
                runs.push((alg, x));
            }
            Err(e @ Error::Config(_)) => return Err(e.into()),
            Err(e) if alg == reference || s.config.algorithm == Some(alg) => return Err(e.into()),
            Err(e) => skipped.push(Skipped {
                algorithm: alg,
                reason: e.to_string(),
            }),
        }
    }
    let n_level_tests = 2 * runs.len() - 1;
    let per_test = args.level / n_level_tests as f64;
    let law = AtomAt {
        law: oracle.transition(horizon, x0, s.config.truncation.unwrap_or_else(|| default_truncation(&oracle)))?,
        location: process.no_jump_value(&grid),
    };
    let moments = oracle.moments_at(horizon)?;
    let u = linspace(-args.u_max, args.u_max, CHF_POINTS);
    let phi = u
        .iter()
        .map(|&v| oracle.chf(v, horizon, x0))
        .collect::<Result<Vec<_>, _>>()?;
    let ref_samples = runs
        .iter()
        .find(|(a, _)| *a == reference)
        .map(|(_, x)| x.clone())
        .expect("reference algorithm always runs");

    let mut results = Vec::new();
    for (alg, x) in &runs {
        let alg = *alg;
        let st = summarize(x)?;
        let (pass, detail) = if st.degenerate {
            let tol = 1e-12 * st.mean.abs().max(1.0);
            let pass = moments.variance == 0.0 && (st.mean - moments.mean).abs() <= tol;
            (pass, json!({"degenerate": true, "value": st.mean, "oracle_mean": moments.mean}))
        } else {
            let d = st.deltas(&moments);
            let pass = d.iter().all(|v| v.abs() <= ORACLE_TOLERANCE_SE);
            (pass, json!({"deltas_se": d, "tolerance_se": ORACLE_TOLERANCE_SE, "stats": st, "oracle": moments}))
        };
        results.push(TestResult { name: "moments".into(), algorithm: alg, pass, detail });

        let rep = chf_check(x, &u, |v| {
            let i = u.iter().position(|w| *w == v).expect("grid point");
            phi[i]
        });
        results.push(TestResult {
            name: "chf".into(),
            algorithm: alg,
            pass: rep.pass,
            detail: json!({"max_abs_error": rep.max_abs_error, "worst_u": rep.worst_u, "tolerance": rep.tolerance}),
        });

        let opts = GofOptions { level: per_test, ..GofOptions::default() };
        let gof = gof_mixed(x, &law, &opts)?;
        results.push(TestResult {
            name: "gof".into(),
            algorithm: alg,
            pass: gof.pass,
            detail: serde_json::to_value(&gof).unwrap_or_default(),
        });

        if alg != reference {
            let ks = ks_two_sample(x, &ref_samples, per_test)?;
            results.push(TestResult {
                name: format!("ks_vs_{reference}"),
                algorithm: alg,
                pass: ks.pass,
                detail: serde_json::to_value(ks).unwrap_or_default(),
            });
        }
    }

    for r in &results {
        let tag = if r.pass { "PASS" } else { "FAIL" };
        println!("{tag} {}/{} {}", r.name, r.algorithm, short(&r.detail));
    }
    for sk in &skipped {
        println!("SKIP {}: {}", sk.algorithm, sk.reason);
    }
    let failed: Vec<String> = results
        .iter()
        .filter(|r| !r.pass)
        .map(|r| format!("{}/{}", r.name, r.algorithm))
        .collect();

    if let Some(path) = &args.report {
        let mut m = meta::scenario("validate", &s)?;
        m.insert("grid".into(), json!(grid.times()));
        m.insert("n_paths".into(), json!(n));
        m.insert("corrupt_beta".into(), json!(args.corrupt_beta));
        m.insert("oracle_process".into(), json!(oracle_value(&oracle)));
        m.insert("family_level".into(), json!(args.level));
        m.insert("per_test_level".into(), json!(per_test));
        m.insert("tests".into(), json!(results));
        m.insert("skipped".into(), json!(skipped));
        m.insert("pass".into(), json!(failed.is_empty()));
        meta::write_json(path, &serde_json::Value::Object(m))?;
    }
    if failed.is_empty() {
        println!("all {} tests passed", results.len());
        Ok(())
    } else {
        Err(CliError::Failed(failed.join(", ")))
    }
}

fn oracle_value(p: &ProcessSpec) -> serde_json::Value {
    serde_json::to_value(p).unwrap_or_default()
}

fn short(detail: &serde_json::Value) -> String {
    let pick = |k: &str| detail.get(k).map(|v| format!("{k}={v}"));
    ["deltas_se", "max_abs_error", "statistic", "p_value", "value"]
        .into_iter()
        .filter_map(pick)
        .chain(
            detail
                .get("continuous")
                .and_then(|c| c.get("p_value"))
                .map(|p| format!("chi2_p={p}")),
        )
        .chain(detail.get("atom").and_then(|a| a.get("z")).map(|z| format!("atom_z={z}")))
        .collect::<Vec<_>>()
        .join(" ")
}
