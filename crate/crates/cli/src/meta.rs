//! Provenance sidecars written next to every output file.

use std::path::{Path, PathBuf};

use serde_json::{json, Map, Value};

use crate::config::Scenario;
use crate::error::{CliError, CliResult};

/// `<out>.meta.json`.
pub fn sidecar_path(out: &Path) -> PathBuf {
    let mut name = out.as_os_str().to_os_string();
    name.push(".meta.json");
    PathBuf::from(name)
}

/// Fields shared by every command. No timestamps, so equal inputs give
/// byte-identical files.
pub fn base(command: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("tool".into(), json!("sdou"));
    m.insert("version".into(), json!(sdou_core::VERSION));
    m.insert("command".into(), json!(command));
    m
}

pub fn scenario(command: &str, s: &Scenario) -> CliResult<Map<String, Value>> {
    let mut m = base(command);
    let process = serde_json::to_value(s.process()).map_err(|e| CliError::Config(e.to_string()))?;
    m.insert("process".into(), process);
    m.insert("seed".into(), json!(s.seed));
    m.insert("seed_source".into(), json!(s.seed_source));
    m.insert("sim_options".into(), json!(s.sim_options()));
    m.insert("execution".into(), json!(s.execution()));
    Ok(m)
}

pub fn write_json(path: &Path, value: &Value) -> CliResult<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Config(e.to_string()))?;
    text.push('\n');
    std::fs::write(path, text).map_err(CliError::io(path))
}

pub fn write_sidecar(out: &Path, meta: Map<String, Value>) -> CliResult<PathBuf> {
    let path = sidecar_path(out);
    write_json(&path, &Value::Object(meta))?;
    Ok(path)
}
