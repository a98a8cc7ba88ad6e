//! Batches of independent paths, sequential or data-parallel.
//!
//! Path `i` of a batch always draws from stream `i` of the batch seed, so a
//! batch is bit-identical whichever [`Execution`] mode produced it.

use std::fmt;
use std::str::FromStr;

#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bgou::BgouSimulator;
use crate::error::{Error, Result};
use crate::gou::{GouSimulator, DEFAULT_TRUNCATION};
use crate::path::{PathSkeleton, TimeGrid};
use crate::rng::RngStream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct SimOptions {
    /// Series truncation used by the rejection samplers.
    pub truncation: usize,
    /// Round a near-integer shape for the binomial samplers instead of failing.
    pub allow_near_integer: bool,
}

impl Default for SimOptions {
    fn default() -> Self {
        Self {
            truncation: DEFAULT_TRUNCATION,
            allow_near_integer: false,
        }
    }
}

/// Step-by-step skeleton sampler on a fixed grid.
pub trait PathSampler: Sync {
    fn grid(&self) -> &TimeGrid;
    fn initial(&self) -> f64;
    /// Draws `X(t_{m+1})` given `X(t_m) = x`.
    fn step(&self, m: usize, x: f64, s: &mut RngStream) -> f64;

    fn terminal(&self, s: &mut RngStream) -> f64 {
        (0..self.grid().n_steps()).fold(self.initial(), |x, m| self.step(m, x, s))
    }

    /// Writes `X(t_0), ..., X(t_M)` into `out`.
    fn fill_path(&self, s: &mut RngStream, out: &mut [f64]) {
        let mut x = self.initial();
        out[0] = x;
        for (m, o) in out[1..].iter_mut().enumerate() {
            x = self.step(m, x, s);
            *o = x;
        }
    }

    fn simulate(&self, s: &mut RngStream) -> PathSkeleton {
        let times = self.grid().times().to_vec();
        let mut values = vec![0.0; times.len()];
        self.fill_path(s, &mut values);
        PathSkeleton { times, values }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Execution {
    Sequential,
    /// Rayon work stealing; equivalent to `Sequential` when the `parallel`
    /// feature is disabled.
    #[default]
    Parallel,
}

impl Execution {
    pub fn name(self) -> &'static str {
        match self {
            Self::Sequential => "sequential",
            Self::Parallel => "parallel",
        }
    }

    /// Whether this mode actually runs on the thread pool in this build.
    pub fn is_parallel(self) -> bool {
        cfg!(feature = "parallel") && self == Self::Parallel
    }
}

impl fmt::Display for Execution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Execution {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "sequential" | "seq" => Ok(Self::Sequential),
            "parallel" | "par" => Ok(Self::Parallel),
            _ => Err(Error::Config(format!("unknown execution mode '{s}'"))),
        }
    }
}

#[cfg(feature = "parallel")]
const MIN_PATHS_PER_TASK: usize = 4096;

/// Terminal values `X(t_M)` of `n_paths` independent paths.
pub fn sample_terminals<P: PathSampler + ?Sized>(
    sampler: &P,
    seed: u64,
    n_paths: usize,
    exec: Execution,
) -> Vec<f64> {
    let mut out = vec![0.0; n_paths];
    fill_terminals(sampler, seed, &mut out, exec);
    out
}

/// Writes the terminal value of path `i` into `out[i]`.
pub fn fill_terminals<P: PathSampler + ?Sized>(
    sampler: &P,
    seed: u64,
    out: &mut [f64],
    exec: Execution,
) {
    let one = |(i, o): (usize, &mut f64)| *o = sampler.terminal(&mut RngStream::new(seed, i as u64));
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        out.par_iter_mut()
            .enumerate()
            .with_min_len(MIN_PATHS_PER_TASK)
            .for_each(one);
        return;
    }
    let _ = exec;
    out.iter_mut().enumerate().for_each(one);
}

/// Full skeletons stored row-major, one row of `times().len()` values per path.
#[derive(Debug, Clone, PartialEq)]
pub struct PathBatch {
    times: Vec<f64>,
    values: Vec<f64>,
}

impl PathBatch {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn n_paths(&self) -> usize {
        self.values.len() / self.times.len()
    }

    pub fn path(&self, i: usize) -> &[f64] {
        let w = self.times.len();
        &self.values[i * w..(i + 1) * w]
    }

    pub fn paths(&self) -> impl Iterator<Item = &[f64]> {
        self.values.chunks_exact(self.times.len())
    }

    /// Values at grid index `m` across all paths.
    pub fn column(&self, m: usize) -> Vec<f64> {
        self.paths().map(|p| p[m]).collect()
    }
}

pub fn sample_paths<P: PathSampler + ?Sized>(
    sampler: &P,
    seed: u64,
    n_paths: usize,
    exec: Execution,
) -> PathBatch {
    let times = sampler.grid().times().to_vec();
    let w = times.len();
    let mut values = vec![0.0; n_paths * w];
    let fill = |(i, row): (usize, &mut [f64])| {
        sampler.fill_path(&mut RngStream::new(seed, i as u64), row);
    };
    #[cfg(feature = "parallel")]
    if exec.is_parallel() {
        values
            .par_chunks_exact_mut(w)
            .enumerate()
            .with_min_len(MIN_PATHS_PER_TASK / w.max(1) + 1)
            .for_each(fill);
        return PathBatch { times, values };
    }
    let _ = exec;
    values.chunks_exact_mut(w).enumerate().for_each(fill);
    PathBatch { times, values }
}

/// Either process behind one sampler type.
#[derive(Debug, Clone)]
pub enum Simulator {
    Gou(GouSimulator),
    Bgou(BgouSimulator),
}

impl PathSampler for Simulator {
    fn grid(&self) -> &TimeGrid {
        match self {
            Self::Gou(s) => s.grid(),
            Self::Bgou(s) => s.grid(),
        }
    }

    fn initial(&self) -> f64 {
        match self {
            Self::Gou(s) => s.initial(),
            Self::Bgou(s) => s.initial(),
        }
    }

    #[inline]
    fn step(&self, m: usize, x: f64, s: &mut RngStream) -> f64 {
        match self {
            Self::Gou(g) => g.step(m, x, s),
            Self::Bgou(b) => b.step(m, x, s),
        }
    }
}

impl From<GouSimulator> for Simulator {
    fn from(s: GouSimulator) -> Self {
        Self::Gou(s)
    }
}

impl From<BgouSimulator> for Simulator {
    fn from(s: BgouSimulator) -> Self {
        Self::Bgou(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gou::{GouAlgorithm, GouParams};

    fn sim() -> GouSimulator {
        let p = GouParams::new(0.5, 1.0, 1.0, 10.0).unwrap();
        GouSimulator::new(
            p,
            TimeGrid::uniform(4, 0.25).unwrap(),
            GouAlgorithm::SdPolya,
            &SimOptions::default(),
        )
        .unwrap()
    }

    #[test]
    fn modes_agree_bit_for_bit() {
        let s = sim();
        let a = sample_terminals(&s, 5, 20_000, Execution::Sequential);
        let b = sample_terminals(&s, 5, 20_000, Execution::Parallel);
        assert_eq!(a, b);
        let pa = sample_paths(&s, 5, 3000, Execution::Sequential);
        let pb = sample_paths(&s, 5, 3000, Execution::Parallel);
        assert_eq!(pa, pb);
        assert_eq!(pa.column(4), a[..3000].to_vec());
    }

    #[test]
    fn path_batch_layout() {
        let b = sample_paths(&sim(), 1, 7, Execution::Sequential);
        assert_eq!(b.n_paths(), 7);
        assert_eq!(b.path(3).len(), 5);
        assert!(b.paths().all(|p| p[0] == 10.0));
        let direct = sim().simulate(&mut RngStream::new(1, 3));
        assert_eq!(direct.values, b.path(3));
    }

    #[test]
    fn execution_parses() {
        assert_eq!("SEQ".parse::<Execution>().unwrap(), Execution::Sequential);
        assert!("gpu".parse::<Execution>().is_err());
    }
}
