//! Gamma-OU process: `dX = -kX dt + dZ` with `Z` compound Poisson of
//! intensity `lambda` and `Exp(beta)` jumps. Its stationary law is
//! `Gamma(lambda/k, beta)` and its time-`t` transition law is the
//! `e^{-kt}`-remainder of that gamma law shifted by `e^{-kt} x`.

mod density;
mod remainder;
mod simulate;
mod weights;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{transition_density_gou, GouTransition};
pub use remainder::{
    sample_remainder_ar, sample_remainder_binomial, sample_remainder_polya, ArRemainder,
    BinomialRemainder, PolyaRemainder,
};
pub use simulate::{simulate_path, GouAlgorithm, GouSimulator};
pub use weights::{polya_mixture_weights, pseudo_mixture_weights, MixtureWeights};
#[cfg(test)]
pub(crate) use remainder::component_kernel;
pub(crate) use remainder::{split_shape, Component, PseudoMixtureSampler};
pub(crate) use weights::{polya_weights, pseudo_weights};

use crate::error::{finite, non_negative, positive, Error, Result};
use crate::moments::Moments;
use crate::quad;
use crate::special::ln_gamma;

/// Default series truncation for mixture weights and densities.
pub const DEFAULT_TRUNCATION: usize = 40;

/// Relative tolerance used to decide that `lambda / k` is an integer.
pub const INTEGER_SHAPE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GouParams {
    /// Mean-reversion rate.
    pub k: f64,
    /// Jump intensity. Zero gives the deterministic decay `x0 e^{-kt}`.
    pub lambda: f64,
    /// Rate of the exponential jump sizes.
    pub beta: f64,
    pub x0: f64,
}

impl GouParams {
    pub fn new(k: f64, lambda: f64, beta: f64, x0: f64) -> Result<Self> {
        let p = Self { k, lambda, beta, x0 };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        non_negative("lambda", self.lambda)?;
        positive("beta", self.beta)?;
        finite("x0", self.x0)?;
        Ok(())
    }

    /// Stationary gamma shape `lambda / k`.
    pub fn alpha(&self) -> f64 {
        self.lambda / self.k
    }

    pub fn decay(&self, dt: f64) -> f64 {
        (-self.k * dt).exp()
    }

    /// Remainder law of a step of length `dt`. Fails for `lambda = 0`.
    pub fn remainder(&self, dt: f64) -> Result<RemainderParams> {
        RemainderParams::new(self.decay(dt), self.alpha(), self.beta)
    }

    /// Closed-form moments of `X(t0 + t)` given `X(t0) = x0`.
    pub fn moments_at(&self, t: f64) -> Moments {
        let a = self.decay(t);
        if self.lambda == 0.0 {
            return Moments {
                mean: a * self.x0,
                variance: 0.0,
                skewness: f64::NAN,
                kurtosis: f64::NAN,
            };
        }
        remainder_moments(&RemainderParams {
            a,
            alpha: self.alpha(),
            beta: self.beta,
        })
        .shifted(a * self.x0)
    }
}

/// Parameters `(a, alpha, beta)` of the `a`-remainder of `Gamma(alpha, beta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RemainderParams {
    pub a: f64,
    pub alpha: f64,
    pub beta: f64,
}

impl RemainderParams {
    pub fn new(a: f64, alpha: f64, beta: f64) -> Result<Self> {
        if !(a > 0.0 && a < 1.0) {
            return Err(Error::Parameter {
                name: "a",
                value: a,
                reason: "must lie in (0, 1)",
            });
        }
        positive("alpha", alpha)?;
        positive("beta", beta)?;
        Ok(Self { a, alpha, beta })
    }

    /// Probability mass of the atom at zero, `a^alpha`.
    pub fn atom(&self) -> f64 {
        self.a.powf(self.alpha)
    }
}

/// `((beta - i u a) / (beta - i u))^alpha` with the branch continuous from `u = 0`.
pub(crate) fn remainder_factor(u: f64, a: f64, alpha: f64, beta: f64) -> Complex64 {
    let num = Complex64::new(beta, -u * a).ln();
    let den = Complex64::new(beta, -u).ln();
    ((num - den) * alpha).exp()
}

/// Conditional characteristic function of `X(s + t)` given `X(s) = xs`.
pub fn chf_gou_conditional(u: f64, t: f64, xs: f64, p: &GouParams) -> Complex64 {
    let a = p.decay(t);
    let phase = Complex64::new(0.0, u * xs * a).exp();
    phase * remainder_factor(u, a, p.alpha(), p.beta)
}

/// Characteristic function of the remainder law.
pub fn chf_remainder(u: f64, r: &RemainderParams) -> Complex64 {
    remainder_factor(u, r.a, r.alpha, r.beta)
}

/// Same conditional characteristic function through the compound-Poisson
/// route: `exp(lambda t (phi_J(u) - 1))` where the jump law is a uniform
/// mixture of `Exp(beta e^{k t v})`, `v ~ U[0,1]`, integrated numerically.
pub fn chf_gou_jump_mixture(u: f64, t: f64, xs: f64, p: &GouParams) -> Complex64 {
    let kt = p.k * t;
    let re = quad::integrate(
        |v| {
            let b = p.beta * (kt * v).exp();
            b * b / (b * b + u * u)
        },
        0.0,
        1.0,
        1e-14,
    );
    let im = quad::integrate(
        |v| {
            let b = p.beta * (kt * v).exp();
            b * u / (b * b + u * u)
        },
        0.0,
        1.0,
        1e-14,
    );
    let phi_j = Complex64::new(re, im);
    let phase = Complex64::new(0.0, u * xs * p.decay(t)).exp();
    phase * ((phi_j - 1.0) * (p.lambda * t)).exp()
}

/// `n`-th cumulant `(1 - a^n) alpha (n-1)! / beta^n` of the remainder.
pub fn remainder_cumulant(n: u32, r: &RemainderParams) -> f64 {
    assert!(n >= 1, "cumulant order starts at 1");
    let n_f = f64::from(n);
    let gamma_cumulant = r.alpha * (ln_gamma(n_f) - n_f * r.beta.ln()).exp();
    -(n_f * r.a.ln()).exp_m1() * gamma_cumulant
}

/// Mean, variance, skewness and non-excess kurtosis of the remainder.
pub fn remainder_moments(r: &RemainderParams) -> Moments {
    Moments::from_cumulants(
        remainder_cumulant(1, r),
        remainder_cumulant(2, r),
        remainder_cumulant(3, r),
        remainder_cumulant(4, r),
    )
}

/// Returns `Some(n)` when `alpha` is within [`INTEGER_SHAPE_TOL`] of a
/// non-negative integer.
pub fn integer_shape(alpha: f64) -> Option<u64> {
    let n = alpha.round();
    if n >= 0.0 && (alpha - n).abs() <= INTEGER_SHAPE_TOL * alpha.abs().max(1.0) {
        Some(n as u64)
    } else {
        None
    }
}
