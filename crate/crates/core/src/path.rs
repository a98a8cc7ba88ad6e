use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Strictly increasing simulation grid `t_0 < t_1 < ... < t_M`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct TimeGrid(Vec<f64>);

impl TimeGrid {
    pub fn new(times: Vec<f64>) -> Result<Self> {
        if times.len() < 2 {
            return Err(Error::Config(
                "time grid needs at least two points".to_string(),
            ));
        }
        if let Some(t) = times.iter().find(|t| !t.is_finite()) {
            return Err(Error::Config(format!("non-finite grid time {t}")));
        }
        if let Some(i) = times.windows(2).position(|w| w[1] <= w[0]) {
            return Err(Error::Config(format!(
                "grid not strictly increasing at step {} ({} -> {})",
                i + 1,
                times[i],
                times[i + 1]
            )));
        }
        Ok(Self(times))
    }

    /// `n_steps` equal steps of width `dt` starting at zero.
    pub fn uniform(n_steps: usize, dt: f64) -> Result<Self> {
        if n_steps == 0 || !(dt > 0.0) {
            return Err(Error::Config(format!(
                "uniform grid needs n_steps >= 1 and dt > 0 (got {n_steps}, {dt})"
            )));
        }
        Self::new((0..=n_steps).map(|i| i as f64 * dt).collect())
    }

    pub fn times(&self) -> &[f64] {
        &self.0
    }

    pub fn n_steps(&self) -> usize {
        self.0.len() - 1
    }

    pub fn start(&self) -> f64 {
        self.0[0]
    }

    pub fn end(&self) -> f64 {
        self.0[self.0.len() - 1]
    }

    pub fn steps(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.windows(2).map(|w| w[1] - w[0])
    }
}

impl TryFrom<Vec<f64>> for TimeGrid {
    type Error = Error;
    fn try_from(v: Vec<f64>) -> Result<Self> {
        Self::new(v)
    }
}

impl From<TimeGrid> for Vec<f64> {
    fn from(g: TimeGrid) -> Self {
        g.0
    }
}

/// Process values at the grid points; `values[0]` is the initial state.
#[derive(Debug, Clone, PartialEq)]
pub struct PathSkeleton {
    pub times: Vec<f64>,
    pub values: Vec<f64>,
}

impl PathSkeleton {
    pub fn terminal(&self) -> f64 {
        self.values[self.values.len() - 1]
    }
}
