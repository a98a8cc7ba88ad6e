use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::remainder::{ArRemainder, BinomialRemainder, PolyaRemainder};
use super::{integer_shape, GouParams};
use crate::error::{Error, Result};
use crate::path::{PathSkeleton, TimeGrid};
use crate::rng::{Erlang, Poisson, RngStream, Sample};
use crate::sim::{PathSampler, SimOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GouAlgorithm {
    /// Decay plus a Polya-mixed Erlang remainder.
    #[serde(rename = "SD_POLYA")]
    SdPolya,
    /// Decay plus a binomial-mixed Erlang remainder; integer `lambda / k` only.
    #[serde(rename = "SD_BINOMIAL")]
    SdBinomial,
    /// Decay plus a remainder drawn by pseudo-mixture rejection.
    #[serde(rename = "AR_PSEUDO")]
    ArPseudo,
    /// Jump times and sizes of the driving compound Poisson process.
    #[serde(rename = "LAWRENCE")]
    Lawrence,
    /// Jump count plus exponential jumps with uniformly mixed rates.
    #[serde(rename = "QU")]
    Qu,
}

impl GouAlgorithm {
    pub const ALL: [GouAlgorithm; 5] = [
        Self::SdPolya,
        Self::SdBinomial,
        Self::ArPseudo,
        Self::Lawrence,
        Self::Qu,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SdPolya => "SD_POLYA",
            Self::SdBinomial => "SD_BINOMIAL",
            Self::ArPseudo => "AR_PSEUDO",
            Self::Lawrence => "LAWRENCE",
            Self::Qu => "QU",
        }
    }
}

impl fmt::Display for GouAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for GouAlgorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown GOU algorithm '{s}'")))
    }
}

#[derive(Debug, Clone)]
enum Kernel {
    Decay,
    Polya(PolyaRemainder),
    Binomial(BinomialRemainder),
    Ar(ArRemainder),
    Lawrence { jumps: Poisson, k: f64, dt: f64, beta: f64 },
    Qu { jumps: Poisson, kdt: f64, beta: f64 },
}

#[derive(Debug, Clone)]
struct Step {
    a: f64,
    kernel: Kernel,
}

const STACK_JUMPS: usize = 32;

impl Step {
    #[inline]
    fn advance(&self, x: f64, s: &mut RngStream) -> f64 {
        let base = x * self.a;
        match &self.kernel {
            Kernel::Decay => base,
            Kernel::Polya(r) => base + r.sample(s),
            Kernel::Binomial(r) => base + r.sample(s),
            Kernel::Ar(r) => base + r.sample(s),
            Kernel::Lawrence { jumps, k, dt, beta } => {
                let n = jumps.sample(s) as usize;
                if n == 0 {
                    return base;
                }
                let mut stack = [0.0f64; STACK_JUMPS];
                let mut heap;
                let taus: &mut [f64] = if n <= STACK_JUMPS {
                    &mut stack[..n]
                } else {
                    heap = vec![0.0; n];
                    &mut heap
                };
                for t in taus.iter_mut() {
                    *t = dt * s.uniform();
                }
                taus.sort_unstable_by(f64::total_cmp);
                let mut y = base;
                for &tau in taus.iter() {
                    y += (-k * (dt - tau)).exp() * Erlang::draw(s, 1, *beta);
                }
                y
            }
            Kernel::Qu { jumps, kdt, beta } => {
                let n = jumps.sample(s);
                let mut y = base;
                for _ in 0..n {
                    let rate = beta * (kdt * s.uniform()).exp();
                    y += Erlang::draw(s, 1, rate);
                }
                y
            }
        }
    }
}

/// Exact skeleton sampler for a GOU process on a fixed grid. Per-step
/// kernels are built once; steps of identical length share a kernel.
#[derive(Debug, Clone)]
pub struct GouSimulator {
    params: GouParams,
    grid: TimeGrid,
    algorithm: GouAlgorithm,
    kernels: Vec<Step>,
    step_kernel: Vec<usize>,
}

impl GouSimulator {
    pub fn new(
        params: GouParams,
        grid: TimeGrid,
        algorithm: GouAlgorithm,
        options: &SimOptions,
    ) -> Result<Self> {
        params.validate()?;
        let mut kernels = Vec::new();
        let mut step_kernel = Vec::with_capacity(grid.n_steps());
        let mut seen: HashMap<u64, usize> = HashMap::new();
        for (m, dt) in grid.steps().enumerate() {
            let idx = match seen.get(&dt.to_bits()) {
                Some(&i) => i,
                None => {
                    kernels.push(build_step(&params, algorithm, dt, m + 1, options)?);
                    seen.insert(dt.to_bits(), kernels.len() - 1);
                    kernels.len() - 1
                }
            };
            step_kernel.push(idx);
        }
        Ok(Self {
            params,
            grid,
            algorithm,
            kernels,
            step_kernel,
        })
    }

    pub fn params(&self) -> &GouParams {
        &self.params
    }

    pub fn algorithm(&self) -> GouAlgorithm {
        self.algorithm
    }
}

impl PathSampler for GouSimulator {
    fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    fn initial(&self) -> f64 {
        self.params.x0
    }

    #[inline]
    fn step(&self, m: usize, x: f64, s: &mut RngStream) -> f64 {
        self.kernels[self.step_kernel[m]].advance(x, s)
    }
}

fn build_step(
    p: &GouParams,
    alg: GouAlgorithm,
    dt: f64,
    m: usize,
    options: &SimOptions,
) -> Result<Step> {
    let a = p.decay(dt);
    if alg == GouAlgorithm::ArPseudo && a < 0.5 {
        return Err(Error::Domain(format!(
            "AR_PSEUDO requires exp(-k*dt) >= 1/2 at every step; step {m} has dt = {dt}, exp(-k*dt) = {a}"
        )));
    }
    let alpha = p.alpha();
    let shape = if alg == GouAlgorithm::SdBinomial {
        Some(binomial_shape(alpha, options.allow_near_integer)?)
    } else {
        None
    };
    if p.lambda == 0.0 {
        return Ok(Step {
            a,
            kernel: Kernel::Decay,
        });
    }
    let kernel = match alg {
        GouAlgorithm::SdPolya => Kernel::Polya(PolyaRemainder::new(&p.remainder(dt)?)?),
        GouAlgorithm::SdBinomial => {
            Kernel::Binomial(BinomialRemainder::new(shape.unwrap_or(0), a, p.beta)?)
        }
        GouAlgorithm::ArPseudo => Kernel::Ar(ArRemainder::new(&p.remainder(dt)?, options.truncation)?),
        GouAlgorithm::Lawrence => Kernel::Lawrence {
            jumps: Poisson::new(p.lambda * dt)?,
            k: p.k,
            dt,
            beta: p.beta,
        },
        GouAlgorithm::Qu => Kernel::Qu {
            jumps: Poisson::new(p.lambda * dt)?,
            kdt: p.k * dt,
            beta: p.beta,
        },
    };
    Ok(Step { a, kernel })
}

fn binomial_shape(alpha: f64, allow_near_integer: bool) -> Result<u64> {
    if let Some(n) = integer_shape(alpha) {
        return Ok(n);
    }
    if allow_near_integer {
        return Ok(alpha.round() as u64);
    }
    Err(Error::Domain(format!(
        "SD_BINOMIAL requires lambda/k to be an integer (lambda/k = {alpha}); \
         enable allow_near_integer to round it"
    )))
}

/// One skeleton of the process on `grid`, with default options.
pub fn simulate_path(
    s: &mut RngStream,
    p: &GouParams,
    grid: &TimeGrid,
    alg: GouAlgorithm,
) -> Result<PathSkeleton> {
    let sim = GouSimulator::new(*p, grid.clone(), alg, &SimOptions::default())?;
    Ok(sim.simulate(s))
}
