use rand_distr::{Distribution, StandardNormal};

use super::RngStream;
use crate::error::{positive, probability, non_negative, Error, Result};

/// Below this mean, Poisson and binomial variates are drawn by sequential
/// inversion of the pmf.
const INVERSION_MEAN_CUTOFF: f64 = 10.0;
/// Below this mean, Polya variates are drawn by sequential inversion.
const POLYA_INVERSION_MEAN_CUTOFF: f64 = 8.0;

pub trait Sample {
    type Output;
    fn sample(&self, s: &mut RngStream) -> Self::Output;
}

#[derive(Debug, Clone, Copy)]
pub struct Exponential {
    inv_rate: f64,
}

impl Exponential {
    pub fn new(rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Self { inv_rate: 1.0 / rate })
    }

    /// Maps a single uniform to the variate.
    #[inline]
    pub fn invert(&self, u: f64) -> f64 {
        -(-u).ln_1p() * self.inv_rate
    }
}

impl Sample for Exponential {
    type Output = f64;
    #[inline]
    fn sample(&self, s: &mut RngStream) -> f64 {
        self.invert(s.uniform())
    }
}

/// Marsaglia-Tsang squeeze for shape >= 1; shapes below one are boosted to
/// `shape + 1` and multiplied by `U^(1/shape)`.
#[derive(Debug, Clone, Copy)]
pub struct Gamma {
    shape: f64,
    inv_rate: f64,
    d: f64,
    c: f64,
    inv_shape_boost: Option<f64>,
}

impl Gamma {
    pub fn new(shape: f64, rate: f64) -> Result<Self> {
        positive("shape", shape)?;
        positive("rate", rate)?;
        let (base, boost) = if shape < 1.0 {
            (shape + 1.0, Some(1.0 / shape))
        } else {
            (shape, None)
        };
        let d = base - 1.0 / 3.0;
        Ok(Self {
            shape,
            inv_rate: 1.0 / rate,
            d,
            c: 1.0 / (9.0 * d).sqrt(),
            inv_shape_boost: boost,
        })
    }

    pub fn shape(&self) -> f64 {
        self.shape
    }
}

impl Sample for Gamma {
    type Output = f64;

    fn sample(&self, s: &mut RngStream) -> f64 {
        let g = loop {
            let x: f64 = StandardNormal.sample(s);
            let v = 1.0 + self.c * x;
            if v <= 0.0 {
                continue;
            }
            let v = v * v * v;
            let u = s.uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + self.d * (1.0 - v + v.ln()) {
                break self.d * v;
            }
        };
        let g = match self.inv_shape_boost {
            Some(inv) => g * (1.0 - s.uniform()).powf(inv),
            None => g,
        };
        g * self.inv_rate
    }
}

/// Gamma with integer shape, drawn as a single variate.
#[derive(Debug, Clone, Copy)]
pub struct Erlang {
    n: u64,
    rate: f64,
}

impl Erlang {
    pub fn new(n: u64, rate: f64) -> Result<Self> {
        positive("rate", rate)?;
        Ok(Self { n, rate })
    }

    /// Draw without re-validating; `rate` must be positive.
    #[inline]
    pub(crate) fn draw(s: &mut RngStream, n: u64, rate: f64) -> f64 {
        match n {
            0 => 0.0,
            1 => -(-s.uniform()).ln_1p() / rate,
            _ => {
                let d = n as f64 - 1.0 / 3.0;
                let g = Gamma {
                    shape: n as f64,
                    inv_rate: 1.0 / rate,
                    d,
                    c: 1.0 / (9.0 * d).sqrt(),
                    inv_shape_boost: None,
                };
                g.sample(s)
            }
        }
    }
}

impl Sample for Erlang {
    type Output = f64;
    #[inline]
    fn sample(&self, s: &mut RngStream) -> f64 {
        Self::draw(s, self.n, self.rate)
    }
}

#[derive(Debug, Clone, Copy)]
enum PoissonMethod {
    Zero,
    Inversion { p0: f64 },
    Rejection(rand_distr::Poisson<f64>),
}

#[derive(Debug, Clone, Copy)]
pub struct Poisson {
    mean: f64,
    method: PoissonMethod,
}

impl Poisson {
    pub fn new(mean: f64) -> Result<Self> {
        non_negative("mean", mean)?;
        let method = if mean == 0.0 {
            PoissonMethod::Zero
        } else if mean < INVERSION_MEAN_CUTOFF {
            PoissonMethod::Inversion { p0: (-mean).exp() }
        } else {
            PoissonMethod::Rejection(
                rand_distr::Poisson::new(mean)
                    .map_err(|e| Error::Domain(format!("poisson mean {mean}: {e}")))?,
            )
        };
        Ok(Self { mean, method })
    }

    pub fn mean(&self) -> f64 {
        self.mean
    }

    /// Probability of a zero count.
    pub fn p0(&self) -> f64 {
        (-self.mean).exp()
    }
}

impl Sample for Poisson {
    type Output = u64;

    #[inline]
    fn sample(&self, s: &mut RngStream) -> u64 {
        match self.method {
            PoissonMethod::Zero => 0,
            PoissonMethod::Inversion { p0 } => {
                let mut u = s.uniform();
                let mut prob = p0;
                let mut k = 0u64;
                while u >= prob {
                    u -= prob;
                    k += 1;
                    prob *= self.mean / k as f64;
                    if prob <= f64::MIN_POSITIVE {
                        break;
                    }
                }
                k
            }
            PoissonMethod::Rejection(d) => d.sample(s) as u64,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum BinomialMethod {
    Constant(u64),
    Inversion { q_pow_n: f64, s: f64, a: f64 },
    Btpe(rand_distr::Binomial),
}

#[derive(Debug, Clone, Copy)]
pub struct Binomial {
    n: u64,
    flipped: bool,
    method: BinomialMethod,
}

impl Binomial {
    pub fn new(n: u64, p: f64) -> Result<Self> {
        probability("p", p)?;
        let flipped = p > 0.5;
        let p_small = if flipped { 1.0 - p } else { p };
        let method = if p_small == 0.0 || n == 0 {
            BinomialMethod::Constant(0)
        } else if n as f64 * p_small < INVERSION_MEAN_CUTOFF {
            let q = 1.0 - p_small;
            let s = p_small / q;
            BinomialMethod::Inversion {
                q_pow_n: (n as f64 * (-p_small).ln_1p()).exp(),
                s,
                a: (n as f64 + 1.0) * s,
            }
        } else {
            BinomialMethod::Btpe(
                rand_distr::Binomial::new(n, p_small)
                    .map_err(|e| Error::Domain(format!("binomial({n}, {p_small}): {e}")))?,
            )
        };
        Ok(Self { n, flipped, method })
    }
}

impl Sample for Binomial {
    type Output = u64;

    #[inline]
    fn sample(&self, s: &mut RngStream) -> u64 {
        let k = match self.method {
            BinomialMethod::Constant(k) => k,
            BinomialMethod::Inversion { q_pow_n, s: ratio, a } => {
                let mut u = s.uniform();
                let mut prob = q_pow_n;
                let mut k = 0u64;
                while u >= prob && k < self.n {
                    u -= prob;
                    k += 1;
                    prob *= a / k as f64 - ratio;
                    if prob <= f64::MIN_POSITIVE {
                        break;
                    }
                }
                k
            }
            BinomialMethod::Btpe(d) => d.sample(s),
        };
        if self.flipped {
            self.n - k
        } else {
            k
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum PolyaMethod {
    Inversion { p0: f64 },
    GammaPoisson(Gamma),
}

/// Polya / negative binomial law with pmf `C(alpha+k-1, k) (1-p)^alpha p^k`.
///
/// Small means are inverted sequentially from `k = 0` (expected cost
/// `1 + mean`); larger means use the gamma-mixed Poisson representation
/// `G ~ Gamma(alpha, scale p/(1-p))`, `S ~ Poisson(G)`.
#[derive(Debug, Clone, Copy)]
pub struct Polya {
    alpha: f64,
    p: f64,
    method: PolyaMethod,
}

impl Polya {
    pub fn new(alpha: f64, p: f64) -> Result<Self> {
        positive("alpha", alpha)?;
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter {
                name: "p",
                value: p,
                reason: "must lie in (0, 1)",
            });
        }
        let mean = alpha * p / (1.0 - p);
        let method = if mean <= POLYA_INVERSION_MEAN_CUTOFF {
            PolyaMethod::Inversion {
                p0: (alpha * (-p).ln_1p()).exp(),
            }
        } else {
            PolyaMethod::GammaPoisson(Gamma::new(alpha, (1.0 - p) / p)?)
        };
        Ok(Self { alpha, p, method })
    }

    /// Forces the gamma-Poisson route regardless of the mean.
    pub fn gamma_poisson(alpha: f64, p: f64) -> Result<Self> {
        let mut d = Self::new(alpha, p)?;
        d.method = PolyaMethod::GammaPoisson(Gamma::new(alpha, (1.0 - p) / p)?);
        Ok(d)
    }

    /// `P{S = 0} = (1-p)^alpha`.
    pub fn p0(&self) -> f64 {
        (self.alpha * (-self.p).ln_1p()).exp()
    }

    pub fn mean(&self) -> f64 {
        self.alpha * self.p / (1.0 - self.p)
    }
}

impl Sample for Polya {
    type Output = u64;

    #[inline]
    fn sample(&self, s: &mut RngStream) -> u64 {
        match self.method {
            PolyaMethod::Inversion { p0 } => {
                let mut u = s.uniform();
                let mut prob = p0;
                let mut k = 0u64;
                while u >= prob {
                    u -= prob;
                    prob *= (self.alpha + k as f64) / (k + 1) as f64 * self.p;
                    k += 1;
                    if prob <= f64::MIN_POSITIVE {
                        break;
                    }
                }
                k
            }
            PolyaMethod::GammaPoisson(g) => {
                let mean = g.sample(s);
                if mean < INVERSION_MEAN_CUTOFF {
                    let mut u = s.uniform();
                    let mut prob = (-mean).exp();
                    let mut k = 0u64;
                    while u >= prob {
                        u -= prob;
                        k += 1;
                        prob *= mean / k as f64;
                        if prob <= f64::MIN_POSITIVE {
                            break;
                        }
                    }
                    k
                } else {
                    Poisson::new(mean).map(|d| d.sample(s)).unwrap_or(0)
                }
            }
        }
    }
}

/// `+Exp(beta1)` with probability `p`, otherwise `-Exp(beta2)`.
#[derive(Debug, Clone, Copy)]
pub struct DoubleExponential {
    up: Exponential,
    down: Exponential,
    p: f64,
}

impl DoubleExponential {
    pub fn new(beta1: f64, beta2: f64, p: f64) -> Result<Self> {
        probability("p", p)?;
        Ok(Self {
            up: Exponential::new(beta1)?,
            down: Exponential::new(beta2)?,
            p,
        })
    }
}

impl Sample for DoubleExponential {
    type Output = f64;
    #[inline]
    fn sample(&self, s: &mut RngStream) -> f64 {
        if s.uniform() < self.p {
            self.up.sample(s)
        } else {
            -self.down.sample(s)
        }
    }
}
