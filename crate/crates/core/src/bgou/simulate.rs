use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::BgouParams;
use crate::error::{Error, Result};
use crate::gou::{
    pseudo_weights, split_shape, Component, PolyaRemainder, PseudoMixtureSampler,
};
use crate::path::{PathSkeleton, TimeGrid};
use crate::rng::{Binomial, DoubleExponential, Erlang, Poisson, Polya, RngStream, Sample};
use crate::sim::{PathSampler, SimOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BgouAlgorithm {
    /// Difference of two independent Polya-mixed Erlang remainders.
    #[serde(rename = "SD_DIFF")]
    SdDiff,
    /// One Polya index shared by an up and a down Erlang draw; symmetric only.
    #[serde(rename = "SD_SYM")]
    SdSym,
    /// Pseudo-mixture rejection with bilateral Erlang proposals; symmetric only.
    #[serde(rename = "AR_SYM")]
    ArSym,
    /// Jump times and two-sided jump sizes of the driving process.
    #[serde(rename = "LAWRENCE_EXT")]
    LawrenceExt,
    /// Jump count plus Laplace jumps with uniformly mixed rates; symmetric only.
    #[serde(rename = "QU_SYM")]
    QuSym,
}

impl BgouAlgorithm {
    pub const ALL: [BgouAlgorithm; 5] = [
        Self::SdDiff,
        Self::SdSym,
        Self::ArSym,
        Self::LawrenceExt,
        Self::QuSym,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::SdDiff => "SD_DIFF",
            Self::SdSym => "SD_SYM",
            Self::ArSym => "AR_SYM",
            Self::LawrenceExt => "LAWRENCE_EXT",
            Self::QuSym => "QU_SYM",
        }
    }

    pub fn requires_symmetry(self) -> bool {
        matches!(self, Self::SdSym | Self::ArSym | Self::QuSym)
    }
}

impl fmt::Display for BgouAlgorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BgouAlgorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|a| a.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::Config(format!("unknown BGOU algorithm '{s}'")))
    }
}

#[derive(Debug, Clone)]
enum Jump {
    Laplace(f64),
    DoubleExponential(DoubleExponential),
}

#[derive(Debug, Clone)]
enum Kernel {
    Diff(PolyaRemainder, PolyaRemainder),
    Sym { index: Polya, rate: f64 },
    Ar {
        integer: Option<Binomial>,
        fractional: Option<PseudoMixtureSampler>,
        beta: f64,
    },
    Lawrence { jumps: Poisson, k: f64, dt: f64, jump: Jump },
    Qu { jumps: Poisson, kdt: f64, beta: f64 },
}

#[derive(Debug, Clone)]
struct Step {
    a: f64,
    kernel: Kernel,
}

const STACK_JUMPS: usize = 32;

#[inline]
fn laplace(s: &mut RngStream, rate: f64) -> f64 {
    Erlang::draw(s, 1, rate) - Erlang::draw(s, 1, rate)
}

impl Step {
    #[inline]
    fn advance(&self, x: f64, s: &mut RngStream) -> f64 {
        let base = x * self.a;
        match &self.kernel {
            Kernel::Diff(up, down) => base + up.sample(s) - down.sample(s),
            Kernel::Sym { index, rate } => {
                let b = index.sample(s);
                base + Erlang::draw(s, b, *rate) - Erlang::draw(s, b, *rate)
            }
            Kernel::Ar {
                integer,
                fractional,
                beta,
            } => {
                let mut y = base;
                if let Some(bin) = integer {
                    let b = bin.sample(s);
                    y += Erlang::draw(s, b, *beta) - Erlang::draw(s, b, *beta);
                }
                if let Some(f) = fractional {
                    y += f.sample_counted(s).0;
                }
                y
            }
            Kernel::Lawrence { jumps, k, dt, jump } => {
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
                    let j = match jump {
                        Jump::Laplace(beta) => laplace(s, *beta),
                        Jump::DoubleExponential(d) => d.sample(s),
                    };
                    y += (-k * (dt - tau)).exp() * j;
                }
                y
            }
            Kernel::Qu { jumps, kdt, beta } => {
                let n = jumps.sample(s);
                let mut y = base;
                for _ in 0..n {
                    let rate = beta * (kdt * s.uniform()).exp();
                    y += laplace(s, rate);
                }
                y
            }
        }
    }
}

/// Exact skeleton sampler for a BGOU process on a fixed grid.
#[derive(Debug, Clone)]
pub struct BgouSimulator {
    params: BgouParams,
    grid: TimeGrid,
    algorithm: BgouAlgorithm,
    kernels: Vec<Step>,
    step_kernel: Vec<usize>,
}

impl BgouSimulator {
    pub fn new(
        params: BgouParams,
        grid: TimeGrid,
        algorithm: BgouAlgorithm,
        options: &SimOptions,
    ) -> Result<Self> {
        params.validate()?;
        if algorithm.requires_symmetry() && !params.is_symmetric() {
            return Err(Error::Domain(format!(
                "{algorithm} requires symmetric parameters (lambda1 = lambda2 and beta1 = beta2)"
            )));
        }
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

    pub fn params(&self) -> &BgouParams {
        &self.params
    }

    pub fn algorithm(&self) -> BgouAlgorithm {
        self.algorithm
    }
}

impl PathSampler for BgouSimulator {
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
    p: &BgouParams,
    alg: BgouAlgorithm,
    dt: f64,
    m: usize,
    options: &SimOptions,
) -> Result<Step> {
    let a = p.decay(dt);
    let kernel = match alg {
        BgouAlgorithm::SdDiff => {
            let r = p.remainder(dt)?;
            Kernel::Diff(PolyaRemainder::new(&r.up()?)?, PolyaRemainder::new(&r.down()?)?)
        }
        BgouAlgorithm::SdSym => Kernel::Sym {
            index: Polya::new(p.alpha1(), 1.0 - a * a)?,
            rate: p.beta1 / a,
        },
        BgouAlgorithm::ArSym => {
            let a2 = a * a;
            if a2 < 0.5 {
                return Err(Error::Domain(format!(
                    "AR_SYM requires exp(-k*dt) >= 1/sqrt(2) at every step; step {m} has dt = {dt}, exp(-k*dt) = {a}"
                )));
            }
            let (n, frac) = split_shape(p.alpha1());
            Kernel::Ar {
                integer: if n > 0 { Some(Binomial::new(n, 1.0 - a2)?) } else { None },
                fractional: frac.map(|g| {
                    PseudoMixtureSampler::new(
                        pseudo_weights(a2, g, options.truncation.max(1)),
                        p.beta1,
                        Component::BilateralErlang,
                    )
                }),
                beta: p.beta1,
            }
        }
        BgouAlgorithm::LawrenceExt => Kernel::Lawrence {
            jumps: Poisson::new(p.lambda() * dt)?,
            k: p.k,
            dt,
            jump: if p.is_symmetric() {
                Jump::Laplace(p.beta1)
            } else {
                Jump::DoubleExponential(DoubleExponential::new(
                    p.beta1,
                    p.beta2,
                    p.lambda1 / p.lambda(),
                )?)
            },
        },
        BgouAlgorithm::QuSym => Kernel::Qu {
            jumps: Poisson::new(p.lambda() * dt)?,
            kdt: p.k * dt,
            beta: p.beta1,
        },
    };
    Ok(Step { a, kernel })
}

/// One skeleton of the process on `grid`, with default options.
pub fn simulate_path_bgou(
    s: &mut RngStream,
    p: &BgouParams,
    grid: &TimeGrid,
    alg: BgouAlgorithm,
) -> Result<PathSkeleton> {
    let sim = BgouSimulator::new(*p, grid.clone(), alg, &SimOptions::default())?;
    Ok(sim.simulate(s))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn names_round_trip() {
        for a in BgouAlgorithm::ALL {
            assert_eq!(a.name().parse::<BgouAlgorithm>().unwrap(), a);
        }
    }

    #[test]
    fn symmetric_only_algorithms_reject_general_params() {
        let p = BgouParams::new(1.0, 1.0, 2.0, 1.5, 2.0, 0.0).unwrap();
        let grid = TimeGrid::uniform(2, 0.1).unwrap();
        for alg in BgouAlgorithm::ALL {
            let r = BgouSimulator::new(p, grid.clone(), alg, &SimOptions::default());
            assert_eq!(r.is_err(), alg.requires_symmetry(), "{alg}");
            if let Err(e) = r {
                assert!(e.to_string().contains(alg.name()));
            }
        }
    }

    #[test]
    fn ar_sym_decay_bound() {
        let p = BgouParams::symmetric(1.0, 1.0, 1.0, 0.0).unwrap();
        let ok = TimeGrid::new(vec![0.0, 0.34]).unwrap();
        let bad = TimeGrid::new(vec![0.0, 0.1, 0.45]).unwrap();
        assert!(BgouSimulator::new(p, ok, BgouAlgorithm::ArSym, &SimOptions::default()).is_ok());
        let e = BgouSimulator::new(p, bad, BgouAlgorithm::ArSym, &SimOptions::default()).unwrap_err();
        assert!(e.to_string().contains("1/sqrt(2)") && e.to_string().contains("step 2"));
    }

    #[test]
    fn deterministic_replay() {
        let p = BgouParams::symmetric(0.5, 1.0, 1.0, 10.0).unwrap();
        let grid = TimeGrid::uniform(4, 0.25).unwrap();
        for alg in BgouAlgorithm::ALL {
            let a = simulate_path_bgou(&mut RngStream::new(3, 17), &p, &grid, alg).unwrap();
            let b = simulate_path_bgou(&mut RngStream::new(3, 17), &p, &grid, alg).unwrap();
            assert_eq!(a, b);
            assert_eq!(a.values[0], 10.0);
        }
    }

    #[test]
    fn ar_sym_acceptance_rate_is_reciprocal_envelope() {
        let (a2, gamma) = (0.6, 0.45);
        let w = pseudo_weights(a2, gamma, 40);
        let sampler = PseudoMixtureSampler::new(w, 1.0, Component::BilateralErlang);
        let c = sampler.positive_mass();
        let mut s = RngStream::new(21, 0);
        let n = 200_000u64;
        let trials: u64 = (0..n).map(|_| sampler.sample_counted(&mut s).1 as u64).sum();
        let rate = n as f64 / trials as f64;
        let se = (rate * (1.0 - rate) / trials as f64).sqrt();
        assert!((rate - 1.0 / c).abs() < 4.0 * se, "{rate} vs {}", 1.0 / c);
    }
}
