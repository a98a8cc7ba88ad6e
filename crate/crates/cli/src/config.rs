//! Scenario files and the flags that override them.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use sdou_core::{Algorithm, Execution, GridSpec, ProcessSpec, SimOptions, TimeGrid};

use crate::error::{CliError, CliResult};

/// Environment variable that replaces the built-in default seed.
pub const SEED_ENV: &str = "SDOU_SEED";
pub const DEFAULT_SEED: u64 = 20210401;

/// Scenario fields settable from the command line. Each given flag replaces
/// the same field of the `--config` file.
#[derive(clap::Args, Debug, Clone, Default)]
pub struct ScenarioArgs {
    /// JSON scenario file.
    #[arg(long, short = 'c', value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// GOU, BGOU_SYM or BGOU.
    #[arg(long)]
    pub process: Option<String>,
    /// Mean-reversion rate.
    #[arg(long)]
    pub k: Option<f64>,
    /// Jump intensity (GOU, BGOU_SYM total).
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Jump rate (GOU, BGOU_SYM).
    #[arg(long)]
    pub beta: Option<f64>,
    /// Up-jump intensity (BGOU).
    #[arg(long)]
    pub lambda1: Option<f64>,
    /// Up-jump rate (BGOU).
    #[arg(long)]
    pub beta1: Option<f64>,
    /// Down-jump intensity (BGOU).
    #[arg(long)]
    pub lambda2: Option<f64>,
    /// Down-jump rate (BGOU).
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Initial value.
    #[arg(long)]
    pub x0: Option<f64>,
    /// End of a uniform grid starting at 0.
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Steps of a uniform grid.
    #[arg(long)]
    pub n_steps: Option<usize>,
    /// Explicit grid times, comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    pub times: Option<Vec<f64>>,
    /// Algorithm name such as SD_POLYA; defaults to the exact reference sampler.
    #[arg(long)]
    pub algorithm: Option<String>,
    /// Number of independent paths.
    #[arg(long)]
    pub n_paths: Option<usize>,
    /// Seed; otherwise the file, then SDOU_SEED, then 20210401.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Series truncation N.
    #[arg(long)]
    pub truncation: Option<usize>,
    /// Round lambda/k to the nearest integer for SD_BINOMIAL.
    #[arg(long)]
    pub allow_near_integer: bool,
    /// sequential or parallel.
    #[arg(long)]
    pub exec: Option<String>,
    /// Output file; a `.meta.json` sidecar is written next to it.
    #[arg(long, short = 'o', value_name = "FILE")]
    pub out: Option<PathBuf>,
}

/// Contents of a scenario file after flags are applied.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ScenarioConfig {
    #[serde(flatten)]
    pub process: ProcessSpec,
    #[serde(default)]
    pub grid: Option<GridSpec>,
    #[serde(default)]
    pub algorithm: Option<Algorithm>,
    #[serde(default)]
    pub n_paths: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    #[serde(default)]
    pub truncation: Option<usize>,
    #[serde(default)]
    pub allow_near_integer: bool,
    #[serde(default)]
    pub execution: Option<Execution>,
    #[serde(default)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SeedSource {
    Flag,
    Config,
    Env,
    Default,
}

/// A validated scenario with the seed resolved.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub seed: u64,
    pub seed_source: SeedSource,
}

impl Scenario {
    pub fn load(args: &ScenarioArgs) -> CliResult<Self> {
        let mut doc = match &args.config {
            Some(path) => read_json(path)?,
            None => Map::new(),
        };
        apply_overrides(&mut doc, args);
        let file_seed = doc.get("seed").and_then(Value::as_u64);
        let config: ScenarioConfig = serde_json::from_value(Value::Object(doc))
            .map_err(|e| CliError::Config(format!("invalid scenario: {e}")))?;
        config.process.validate()?;
        if config.n_paths == Some(0) {
            return Err(CliError::Config("n_paths must be at least 1".into()));
        }
        if config.truncation == Some(0) {
            return Err(CliError::Config("truncation must be at least 1".into()));
        }
        let (seed, seed_source) = resolve_seed(args.seed, file_seed)?;
        Ok(Self {
            config,
            seed,
            seed_source,
        })
    }

    pub fn process(&self) -> &ProcessSpec {
        &self.config.process
    }

    pub fn grid(&self) -> CliResult<TimeGrid> {
        let spec = self.config.grid.as_ref().ok_or_else(|| {
            CliError::Config("no time grid: give --t-end and --n-steps, --times, or a \"grid\" entry".into())
        })?;
        Ok(spec.to_grid()?)
    }

    pub fn algorithm(&self) -> Algorithm {
        self.config
            .algorithm
            .unwrap_or_else(|| self.config.process.reference_algorithm())
    }

    pub fn execution(&self) -> Execution {
        self.config.execution.unwrap_or_default()
    }

    pub fn sim_options(&self) -> SimOptions {
        let d = SimOptions::default();
        SimOptions {
            truncation: self.config.truncation.unwrap_or(d.truncation),
            allow_near_integer: self.config.allow_near_integer,
        }
    }

    pub fn output(&self) -> Option<&Path> {
        self.config.output.as_deref()
    }
}

pub fn read_json(path: &Path) -> CliResult<Map<String, Value>> {
    let text = std::fs::read_to_string(path).map_err(CliError::io(path))?;
    match serde_json::from_str(&text) {
        Ok(Value::Object(m)) => Ok(m),
        Ok(_) => Err(CliError::Config(format!("{}: expected a JSON object", path.display()))),
        Err(e) => Err(CliError::Config(format!("{}: {e}", path.display()))),
    }
}

/// Flag, then file, then `SDOU_SEED`, then the built-in default.
pub fn resolve_seed(flag: Option<u64>, file: Option<u64>) -> CliResult<(u64, SeedSource)> {
    if let Some(s) = flag {
        return Ok((s, SeedSource::Flag));
    }
    if let Some(s) = file {
        return Ok((s, SeedSource::Config));
    }
    match std::env::var(SEED_ENV) {
        Ok(v) => v
            .trim()
            .parse()
            .map(|s| (s, SeedSource::Env))
            .map_err(|_| CliError::Config(format!("{SEED_ENV}='{v}' is not an unsigned integer"))),
        Err(_) => Ok((DEFAULT_SEED, SeedSource::Default)),
    }
}

fn apply_overrides(doc: &mut Map<String, Value>, a: &ScenarioArgs) {
    let mut set = |key: &str, v: Option<Value>| {
        if let Some(v) = v {
            doc.insert(key.to_string(), v);
        }
    };
    set("process", a.process.clone().map(|p| Value::String(p.to_ascii_uppercase())));
    for (key, v) in [
        ("k", a.k),
        ("lambda", a.lambda),
        ("beta", a.beta),
        ("lambda1", a.lambda1),
        ("beta1", a.beta1),
        ("lambda2", a.lambda2),
        ("beta2", a.beta2),
        ("x0", a.x0),
    ] {
        set(key, v.map(Value::from));
    }
    set("algorithm", a.algorithm.clone().map(Value::String));
    set("n_paths", a.n_paths.map(Value::from));
    set("seed", a.seed.map(Value::from));
    set("truncation", a.truncation.map(Value::from));
    set("execution", a.exec.as_ref().map(|e| Value::String(normalize_exec(e))));
    set("output", a.out.as_ref().map(|p| Value::String(p.display().to_string())));
    if a.allow_near_integer {
        set("allow_near_integer", Some(Value::Bool(true)));
    }
    if let Some(times) = &a.times {
        doc.insert("grid".into(), serde_json::json!({ "times": times }));
    } else if a.t_end.is_some() || a.n_steps.is_some() {
        let mut grid = match doc.remove("grid") {
            Some(Value::Object(g)) if !g.contains_key("times") => g,
            _ => Map::new(),
        };
        if let Some(t) = a.t_end {
            grid.insert("t_end".into(), Value::from(t));
        }
        if let Some(n) = a.n_steps {
            grid.insert("n_steps".into(), Value::from(n));
        }
        doc.insert("grid".into(), Value::Object(grid));
    }
}

fn normalize_exec(s: &str) -> String {
    s.parse::<Execution>()
        .map(|e| e.name().to_string())
        .unwrap_or_else(|_| s.to_string())
}
