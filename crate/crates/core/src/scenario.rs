//! Serializable descriptions of what to simulate: process, algorithm, grid.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::bgou::{chf_bgou_conditional, BgouAlgorithm, BgouParams, BgouSimulator, BgouTransition};
use crate::error::{Error, Result};
use crate::gou::{chf_gou_conditional, GouAlgorithm, GouParams, GouSimulator, GouTransition};
use crate::law::TransitionDensity;
use crate::moments::Moments;
use crate::path::TimeGrid;
use crate::sim::{SimOptions, Simulator};

/// Process family as reported in benchmark tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ProcessKind {
    #[serde(rename = "GOU")]
    Gou,
    #[serde(rename = "BGOU_SYM")]
    BgouSym,
    #[serde(rename = "BGOU_GEN")]
    BgouGen,
}

impl ProcessKind {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gou => "GOU",
            Self::BgouSym => "BGOU_SYM",
            Self::BgouGen => "BGOU_GEN",
        }
    }
}

impl fmt::Display for ProcessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Process and parameters. The symmetric form takes the total jump
/// intensity `lambda`, split evenly between up and down jumps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "process")]
pub enum ProcessSpec {
    #[serde(rename = "GOU")]
    Gou(GouParams),
    #[serde(rename = "BGOU")]
    Bgou(BgouParams),
    #[serde(rename = "BGOU_SYM")]
    BgouSym {
        k: f64,
        lambda: f64,
        beta: f64,
        x0: f64,
    },
}

/// Parameters flattened to the six columns used in tables.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatParams {
    pub k: f64,
    pub lambda1: f64,
    pub beta1: f64,
    pub lambda2: Option<f64>,
    pub beta2: Option<f64>,
    pub x0: f64,
}

impl ProcessSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Gou(p) => p.validate(),
            Self::Bgou(p) => p.validate(),
            Self::BgouSym { .. } => self.bgou_params().map(|_| ()),
        }
    }

    fn bgou_params(&self) -> Result<BgouParams> {
        match *self {
            Self::Gou(_) => Err(Error::Config("not a BGOU process".into())),
            Self::Bgou(p) => Ok(p),
            Self::BgouSym { k, lambda, beta, x0 } => BgouParams::symmetric(k, lambda, beta, x0),
        }
    }

    pub fn kind(&self) -> ProcessKind {
        match self {
            Self::Gou(_) => ProcessKind::Gou,
            Self::BgouSym { .. } => ProcessKind::BgouSym,
            Self::Bgou(p) if p.is_symmetric() => ProcessKind::BgouSym,
            Self::Bgou(_) => ProcessKind::BgouGen,
        }
    }

    pub fn x0(&self) -> f64 {
        match self {
            Self::Gou(p) => p.x0,
            Self::Bgou(p) => p.x0,
            Self::BgouSym { x0, .. } => *x0,
        }
    }

    pub fn flat(&self) -> Result<FlatParams> {
        Ok(match self {
            Self::Gou(p) => FlatParams {
                k: p.k,
                lambda1: p.lambda,
                beta1: p.beta,
                lambda2: None,
                beta2: None,
                x0: p.x0,
            },
            _ => {
                let p = self.bgou_params()?;
                FlatParams {
                    k: p.k,
                    lambda1: p.lambda1,
                    beta1: p.beta1,
                    lambda2: Some(p.lambda2),
                    beta2: Some(p.beta2),
                    x0: p.x0,
                }
            }
        })
    }

    /// Closed-form moments of `X(t)` started from `x0` at time zero.
    pub fn moments_at(&self, t: f64) -> Result<Moments> {
        Ok(match self {
            Self::Gou(p) => p.moments_at(t),
            _ => self.bgou_params()?.moments_at(t),
        })
    }

    /// Terminal value of a path with no jumps on `grid`, as the samplers
    /// compute it (one decay factor per step). Jump-free paths hit this value
    /// exactly, which can differ in the last bits from `x0 e^{-kT}`.
    pub fn no_jump_value(&self, grid: &TimeGrid) -> f64 {
        let k = self.flat().map(|f| f.k).unwrap_or(f64::NAN);
        grid.steps().fold(self.x0(), |x, dt| x * (-k * dt).exp())
    }

    /// CF of `X(t)` given `X(0) = xs`.
    pub fn chf(&self, u: f64, t: f64, xs: f64) -> Result<Complex64> {
        Ok(match self {
            Self::Gou(p) => chf_gou_conditional(u, t, xs, p),
            _ => chf_bgou_conditional(u, t, xs, &self.bgou_params()?),
        })
    }

    /// Law of `X(t)` given `X(0) = y`, with `truncation` series terms.
    pub fn transition(&self, t: f64, y: f64, truncation: usize) -> Result<Box<dyn TransitionDensity + Send + Sync>> {
        Ok(match self {
            Self::Gou(p) => Box::new(GouTransition::new(t, y, p, truncation)?),
            _ => Box::new(BgouTransition::new(t, y, &self.bgou_params()?, truncation)?),
        })
    }

    /// Same process with every jump rate multiplied by `factor`.
    pub fn with_rates_scaled(&self, factor: f64) -> Self {
        match *self {
            Self::Gou(p) => Self::Gou(GouParams { beta: p.beta * factor, ..p }),
            Self::Bgou(p) => Self::Bgou(BgouParams {
                beta1: p.beta1 * factor,
                beta2: p.beta2 * factor,
                ..p
            }),
            Self::BgouSym { k, lambda, beta, x0 } => Self::BgouSym {
                k,
                lambda,
                beta: beta * factor,
                x0,
            },
        }
    }

    /// Exact-simulation reference algorithm used as the timing baseline.
    pub fn reference_algorithm(&self) -> Algorithm {
        match self.kind() {
            ProcessKind::Gou => Algorithm::Gou(GouAlgorithm::SdPolya),
            ProcessKind::BgouSym => Algorithm::Bgou(BgouAlgorithm::SdSym),
            ProcessKind::BgouGen => Algorithm::Bgou(BgouAlgorithm::SdDiff),
        }
    }

    /// Algorithms that apply to this process family.
    pub fn algorithms(&self) -> Vec<Algorithm> {
        match self {
            Self::Gou(_) => GouAlgorithm::ALL.into_iter().map(Algorithm::Gou).collect(),
            _ => BgouAlgorithm::ALL.into_iter().map(Algorithm::Bgou).collect(),
        }
    }

    pub fn simulator(&self, alg: Algorithm, grid: TimeGrid, options: &SimOptions) -> Result<Simulator> {
        match (self, alg) {
            (Self::Gou(p), Algorithm::Gou(a)) => Ok(GouSimulator::new(*p, grid, a, options)?.into()),
            (Self::Gou(_), Algorithm::Bgou(a)) => Err(Error::Config(format!(
                "{a} is a BGOU algorithm and cannot simulate a GOU process"
            ))),
            (_, Algorithm::Bgou(a)) => {
                Ok(BgouSimulator::new(self.bgou_params()?, grid, a, options)?.into())
            }
            (_, Algorithm::Gou(a)) => Err(Error::Config(format!(
                "{a} is a GOU algorithm and cannot simulate a BGOU process"
            ))),
        }
    }
}

/// Any simulation algorithm, written by its table name (e.g. `SD_POLYA`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Algorithm {
    Gou(GouAlgorithm),
    Bgou(BgouAlgorithm),
}

impl Algorithm {
    pub fn name(self) -> &'static str {
        match self {
            Self::Gou(a) => a.name(),
            Self::Bgou(a) => a.name(),
        }
    }
}

impl fmt::Display for Algorithm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Algorithm {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        s.parse::<GouAlgorithm>()
            .map(Self::Gou)
            .or_else(|_| s.parse::<BgouAlgorithm>().map(Self::Bgou))
            .map_err(|_| Error::Config(format!("unknown algorithm '{s}'")))
    }
}

impl Serialize for Algorithm {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Algorithm {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Either `n_steps` equal steps up to `t_end`, or explicit times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Uniform { t_end: f64, n_steps: usize },
    Times { times: Vec<f64> },
}

impl GridSpec {
    pub fn to_grid(&self) -> Result<TimeGrid> {
        match self {
            Self::Uniform { t_end, n_steps } => {
                if *n_steps == 0 || !(*t_end > 0.0) || !t_end.is_finite() {
                    return Err(Error::Config(format!(
                        "grid needs t_end > 0 and n_steps >= 1 (got t_end = {t_end}, n_steps = {n_steps})"
                    )));
                }
                let dt = t_end / *n_steps as f64;
                TimeGrid::uniform(*n_steps, dt)
            }
            Self::Times { times } => TimeGrid::new(times.clone()),
        }
    }
}
