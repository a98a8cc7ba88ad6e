use std::io::Write;

use serde_json::json;

use sdou_core::{ProcessSpec, TransitionDensity};

use crate::config::{Scenario, ScenarioArgs};
use crate::error::{CliError, CliResult};
use crate::meta;

/// Series terms used when `--truncation` is not given.
pub fn default_truncation(p: &ProcessSpec) -> usize {
    match p {
        ProcessSpec::Gou(_) => 200,
        _ => 60,
    }
}

#[derive(clap::Args, Debug)]
pub struct Args {
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Horizon; defaults to the length of the scenario grid.
    #[arg(long)]
    pub t: Option<f64>,
    /// Starting value; defaults to x0.
    #[arg(long)]
    pub y: Option<f64>,
    #[arg(long)]
    pub x_min: Option<f64>,
    #[arg(long)]
    pub x_max: Option<f64>,
    #[arg(long, default_value_t = 401)]
    pub n_points: usize,
}

pub fn run(args: &Args) -> CliResult<()> {
    let s = Scenario::load(&args.scenario)?;
    let p = s.process();
    let t = match args.t {
        Some(t) => t,
        None => {
            let g = s.grid()?;
            g.end() - g.start()
        }
    };
    if !(t > 0.0 && t.is_finite()) {
        return Err(CliError::Config(format!("horizon t must be positive and finite (got {t})")));
    }
    if args.n_points < 2 {
        return Err(CliError::Config("n_points must be at least 2".into()));
    }
    let y = args.y.unwrap_or(p.x0());
    let truncation = s.config.truncation.unwrap_or_else(|| default_truncation(p));
    let law = p.transition(t, y, truncation)?;
    let (lo, hi) = x_range(args, &*law, p, t, y)?;
    let xs: Vec<f64> = (0..args.n_points)
        .map(|i| lo + (hi - lo) * i as f64 / (args.n_points - 1) as f64)
        .collect();

    let mut text = String::from("kind,x,value\n");
    text.push_str(&format!("atom,{},{}\n", law.atom_location(), law.atom_prob()));
    for &x in &xs {
        text.push_str(&format!("density,{x},{}\n", law.density(x)));
    }
    let mass = law.total_mass(1e-10);
    match s.output() {
        Some(out) => {
            std::fs::write(out, &text).map_err(CliError::io(out))?;
            let mut m = meta::scenario("density", &s)?;
            m.insert("t".into(), json!(t));
            m.insert("y".into(), json!(y));
            m.insert("truncation".into(), json!(truncation));
            m.insert("atom".into(), json!({"location": law.atom_location(), "mass": law.atom_prob()}));
            m.insert("series_tail_mass".into(), json!(law.tail_mass()));
            m.insert("total_mass".into(), json!(mass));
            meta::write_sidecar(out, m)?;
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(CliError::io("<stdout>"))?,
    }
    eprintln!(
        "atom {} at {}; atom + integrated density = {mass:.10}",
        law.atom_prob(),
        law.atom_location()
    );
    Ok(())
}

/// Explicit bounds, else ten standard deviations around the mean clipped
/// to the support.
fn x_range(args: &Args, law: &dyn TransitionDensity, p: &ProcessSpec, t: f64, y: f64) -> CliResult<(f64, f64)> {
    let shifted = match *p {
        ProcessSpec::Gou(g) => ProcessSpec::Gou(sdou_core::gou::GouParams { x0: y, ..g }),
        ProcessSpec::Bgou(b) => ProcessSpec::Bgou(sdou_core::bgou::BgouParams { x0: y, ..b }),
        ProcessSpec::BgouSym { k, lambda, beta, .. } => ProcessSpec::BgouSym { k, lambda, beta, x0: y },
    };
    let m = shifted.moments_at(t)?;
    let sd = m.variance.sqrt().max(1e-12);
    let (s_lo, s_hi) = law.support();
    let lo = args.x_min.unwrap_or((m.mean - 10.0 * sd).max(s_lo));
    let hi = args.x_max.unwrap_or((m.mean + 10.0 * sd).min(s_hi));
    if !(lo < hi) {
        return Err(CliError::Config(format!("empty x range [{lo}, {hi}]")));
    }
    Ok((lo, hi))
}
