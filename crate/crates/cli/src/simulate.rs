use std::path::Path;

use serde_json::json;

use sdou_core::{sample_paths, PathBatch};

use crate::config::{Scenario, ScenarioArgs};
use crate::error::{CliError, CliResult};
use crate::meta;

const DEFAULT_PATHS: usize = 1_000;

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

pub fn run(args: &Args) -> CliResult<()> {
    let s = Scenario::load(&args.scenario)?;
    let out = s
        .output()
        .ok_or_else(|| CliError::Config("no output file: give --out or an \"output\" entry".into()))?
        .to_path_buf();
    let grid = s.grid()?;
    let alg = s.algorithm();
    let n_paths = s.config.n_paths.unwrap_or(DEFAULT_PATHS);
    let sim = s.process().simulator(alg, grid.clone(), &s.sim_options())?;
    let batch = sample_paths(&sim, s.seed, n_paths, s.execution());
    write_paths(&out, &batch)?;

    let mut m = meta::scenario("simulate", &s)?;
    m.insert("algorithm".into(), json!(alg));
    m.insert("grid".into(), json!(grid.times()));
    m.insert("n_paths".into(), json!(n_paths));
    m.insert("output".into(), json!(out.display().to_string()));
    let side = meta::write_sidecar(&out, m)?;
    eprintln!(
        "wrote {n_paths} paths x {} times ({alg}) to {} and {}",
        grid.times().len(),
        out.display(),
        side.display()
    );
    Ok(())
}

/// Header of grid times, then one row per path.
pub fn write_paths(out: &Path, batch: &PathBatch) -> CliResult<()> {
    let csv_err = |e: csv::Error| CliError::Config(format!("{}: {e}", out.display()));
    let mut w = csv::Writer::from_path(out).map_err(csv_err)?;
    w.write_record(batch.times().iter().map(|t| t.to_string())).map_err(csv_err)?;
    for row in batch.paths() {
        w.write_record(row.iter().map(|x| x.to_string())).map_err(csv_err)?;
    }
    w.flush().map_err(CliError::io(out))
}
