//! Exact samplers for the remainder law `GAM''(alpha, beta)`.

use super::{integer_shape, pseudo_weights, RemainderParams};
use crate::error::{positive, Error, Result};
use crate::rng::{Binomial, Erlang, Polya, RngStream, Sample};

/// Erlang(`B`, `beta/a`) with a Polya(`alpha`, `1-a`) random index `B`.
#[derive(Debug, Clone, Copy)]
pub struct PolyaRemainder {
    index: Polya,
    rate: f64,
}

impl PolyaRemainder {
    pub fn new(r: &RemainderParams) -> Result<Self> {
        Ok(Self {
            index: Polya::new(r.alpha, 1.0 - r.a)?,
            rate: r.beta / r.a,
        })
    }

    #[inline]
    pub fn sample_index(&self, s: &mut RngStream) -> u64 {
        self.index.sample(s)
    }
}

impl Sample for PolyaRemainder {
    type Output = f64;
    #[inline]
    fn sample(&self, s: &mut RngStream) -> f64 {
        let b = self.index.sample(s);
        Erlang::draw(s, b, self.rate)
    }
}

/// Erlang(`B`, `beta`) with a Binomial(`n`, `1-a`) index; exact when the
/// gamma shape is the integer `n`.
#[derive(Debug, Clone, Copy)]
pub struct BinomialRemainder {
    index: Binomial,
    rate: f64,
}

impl BinomialRemainder {
    pub fn new(n: u64, a: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Parameter {
                name: "a",
                value: a,
                reason: "must lie in (0, 1)",
            });
        }
        positive("beta", beta)?;
        Ok(Self {
            index: Binomial::new(n, 1.0 - a)?,
            rate: beta,
        })
    }
}

impl Sample for BinomialRemainder {
    type Output = f64;
    #[inline]
    fn sample(&self, s: &mut RngStream) -> f64 {
        let b = self.index.sample(s);
        Erlang::draw(s, b, self.rate)
    }
}

/// Mixture components used by the pseudo-mixture rejection sampler.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Component {
    /// Erlang(k, 1).
    Erlang,
    /// Erlang(k, 1) - Erlang(k, 1).
    BilateralErlang,
}

/// Unnormalised component densities on the unit-rate scale with the common
/// `e^{-|z|}` factor removed, for `k = 1..=n`.
///
/// Erlang: `z^{k-1} / (k-1)!`. Bilateral Erlang: `s_k(|z|)` where
/// `s_1 = 1/2`, `s_2 = (1+x)/4`,
/// `s_{k+1} = (2k-1)/(2k) s_k + x^2 / (4k(k-1)) s_{k-1}`
/// (the half-integer Bessel-K recurrence).
#[inline]
pub(crate) fn component_kernel(component: Component, z: f64, n: usize, out: &mut [f64]) {
    match component {
        Component::Erlang => {
            let mut t = 1.0;
            for (k, o) in out.iter_mut().enumerate().take(n) {
                if k > 0 {
                    t *= z / k as f64;
                }
                *o = t;
            }
        }
        Component::BilateralErlang => {
            let x = z.abs();
            let x2 = x * x;
            if n == 0 {
                return;
            }
            out[0] = 0.5;
            if n == 1 {
                return;
            }
            out[1] = 0.25 * (1.0 + x);
            for k in 2..n {
                let kf = k as f64;
                out[k] = (2.0 * kf - 1.0) / (2.0 * kf) * out[k - 1]
                    + x2 / (4.0 * kf * (kf - 1.0)) * out[k - 2];
            }
        }
    }
}

/// Rejection sampler for a truncated pseudo-mixture
/// `omega_0 delta + sum_k omega_k f_k` with signed weights, using the
/// positive part as the dominating true mixture.
#[derive(Debug, Clone)]
pub(crate) struct PseudoMixtureSampler {
    signed: Vec<f64>,
    positive: Vec<f64>,
    cdf: Vec<f64>,
    positive_mass: f64,
    inv_beta: f64,
    component: Component,
}

impl PseudoMixtureSampler {
    pub(crate) fn new(weights: Vec<f64>, beta: f64, component: Component) -> Self {
        let positive: Vec<f64> = weights.iter().map(|w| w.max(0.0)).collect();
        let c: f64 = positive.iter().sum();
        let mut acc = 0.0;
        let cdf = positive
            .iter()
            .map(|w| {
                acc += w / c;
                acc
            })
            .collect();
        Self {
            signed: weights,
            positive,
            cdf,
            positive_mass: c,
            inv_beta: 1.0 / beta,
            component,
        }
    }

    pub(crate) fn positive_mass(&self) -> f64 {
        self.positive_mass
    }

    #[inline]
    fn index(&self, s: &mut RngStream) -> usize {
        let u = s.uniform();
        self.cdf
            .iter()
            .position(|&c| u < c)
            .unwrap_or(self.cdf.len() - 1)
    }

    /// One accepted draw and the number of proposals it took.
    pub(crate) fn sample_counted(&self, s: &mut RngStream) -> (f64, u32) {
        let n = self.signed.len() - 1;
        let mut kernel = [0.0f64; 128];
        let mut heap;
        let buf: &mut [f64] = if n <= kernel.len() {
            &mut kernel[..n]
        } else {
            heap = vec![0.0; n];
            &mut heap
        };
        let mut proposals = 0u32;
        loop {
            proposals += 1;
            let idx = self.index(s);
            if idx == 0 {
                return (0.0, proposals);
            }
            let z = match self.component {
                Component::Erlang => Erlang::draw(s, idx as u64, 1.0),
                Component::BilateralErlang => {
                    Erlang::draw(s, idx as u64, 1.0) - Erlang::draw(s, idx as u64, 1.0)
                }
            };
            let u = s.uniform();
            component_kernel(self.component, z, n, buf);
            let (mut target, mut envelope) = (0.0, 0.0);
            for (k, f) in buf.iter().enumerate() {
                target += self.signed[k + 1] * f;
                envelope += self.positive[k + 1] * f;
            }
            if target > 0.0 && u * envelope < target {
                return (z * self.inv_beta, proposals);
            }
        }
    }
}

/// Rejection sampler built on the signed pseudo-mixture expansion; needs
/// `a >= 1/2`. Shapes above one are split into an integer part drawn from
/// the binomial mixture and a fractional part drawn by rejection.
#[derive(Debug, Clone)]
pub struct ArRemainder {
    integer: Option<BinomialRemainder>,
    fractional: Option<PseudoMixtureSampler>,
}

impl ArRemainder {
    pub fn new(r: &RemainderParams, truncation: usize) -> Result<Self> {
        if r.a < 0.5 {
            return Err(Error::Domain(format!(
                "rejection sampler requires a >= 1/2 (got a = {})",
                r.a
            )));
        }
        if truncation == 0 {
            return Err(Error::Domain("truncation must be at least 1".into()));
        }
        let (n, frac) = split_shape(r.alpha);
        let integer = if n > 0 {
            Some(BinomialRemainder::new(n, r.a, r.beta)?)
        } else {
            None
        };
        let fractional = frac.map(|g| {
            PseudoMixtureSampler::new(pseudo_weights(r.a, g, truncation), r.beta, Component::Erlang)
        });
        Ok(Self {
            integer,
            fractional,
        })
    }

    /// Envelope constant `c` of the fractional part (1 when there is none).
    pub fn positive_mass(&self) -> f64 {
        self.fractional.as_ref().map_or(1.0, |f| f.positive_mass())
    }

    /// Draw plus the number of rejection proposals used by the fractional part.
    pub fn sample_counted(&self, s: &mut RngStream) -> (f64, u32) {
        let mut z = 0.0;
        if let Some(b) = &self.integer {
            z += b.sample(s);
        }
        let mut proposals = 0;
        if let Some(f) = &self.fractional {
            let (v, p) = f.sample_counted(s);
            z += v;
            proposals = p;
        }
        (z, proposals)
    }
}

impl Sample for ArRemainder {
    type Output = f64;
    #[inline]
    fn sample(&self, s: &mut RngStream) -> f64 {
        self.sample_counted(s).0
    }
}

/// `alpha = n + gamma` with `gamma` in `(0, 1)`, or `None` when `alpha` is an
/// integer to within the integer-shape tolerance.
pub(crate) fn split_shape(alpha: f64) -> (u64, Option<f64>) {
    if let Some(n) = integer_shape(alpha) {
        return (n, None);
    }
    if alpha < 1.0 {
        return (0, Some(alpha));
    }
    let n = alpha.floor();
    (n as u64, Some(alpha - n))
}

pub fn sample_remainder_polya(s: &mut RngStream, r: &RemainderParams) -> Result<f64> {
    Ok(PolyaRemainder::new(r)?.sample(s))
}

pub fn sample_remainder_binomial(s: &mut RngStream, n: u64, a: f64, beta: f64) -> Result<f64> {
    Ok(BinomialRemainder::new(n, a, beta)?.sample(s))
}

pub fn sample_remainder_ar(s: &mut RngStream, r: &RemainderParams, truncation: usize) -> Result<f64> {
    Ok(ArRemainder::new(r, truncation)?.sample(s))
}
