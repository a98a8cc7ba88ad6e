//! Bilateral-gamma OU process: `dX = -kX dt + dZ_u - dZ_d` with independent
//! compound Poisson drivers `(lambda1, Exp(beta1))` and `(lambda2, Exp(beta2))`.
//! The time-`t` transition law is the difference of two gamma remainders
//! sharing `a = e^{-kt}`, shifted by `a x`.

mod density;
mod simulate;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

pub use density::{transition_density_bgou, BgouTransition};
pub use simulate::{simulate_path_bgou, BgouAlgorithm, BgouSimulator};

use crate::error::{finite, positive, Error, Result};
use crate::gou::{remainder_factor, MixtureWeights, RemainderParams};
use crate::gou::polya_weights;
use crate::moments::Moments;
use crate::special::{ln_factorial, ln_gamma};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BgouParams {
    pub k: f64,
    pub lambda1: f64,
    pub beta1: f64,
    pub lambda2: f64,
    pub beta2: f64,
    pub x0: f64,
}

impl BgouParams {
    pub fn new(k: f64, lambda1: f64, beta1: f64, lambda2: f64, beta2: f64, x0: f64) -> Result<Self> {
        let p = Self {
            k,
            lambda1,
            beta1,
            lambda2,
            beta2,
            x0,
        };
        p.validate()?;
        Ok(p)
    }

    /// Symmetric process with total jump intensity `lambda` split evenly
    /// between up and down jumps, both `Exp(beta)`.
    pub fn symmetric(k: f64, lambda: f64, beta: f64, x0: f64) -> Result<Self> {
        positive("lambda", lambda)?;
        Self::new(k, 0.5 * lambda, beta, 0.5 * lambda, beta, x0)
    }

    /// Driver with intensity `lambda` and double-exponential jumps: up with
    /// probability `p`, sizes `Exp(beta1)` up and `Exp(beta2)` down.
    pub fn from_double_exponential(
        k: f64,
        lambda: f64,
        beta1: f64,
        beta2: f64,
        p: f64,
        x0: f64,
    ) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Parameter {
                name: "p",
                value: p,
                reason: "must lie in (0, 1)",
            });
        }
        positive("lambda", lambda)?;
        Self::new(k, p * lambda, beta1, (1.0 - p) * lambda, beta2, x0)
    }

    pub fn validate(&self) -> Result<()> {
        positive("k", self.k)?;
        positive("lambda1", self.lambda1)?;
        positive("beta1", self.beta1)?;
        positive("lambda2", self.lambda2)?;
        positive("beta2", self.beta2)?;
        finite("x0", self.x0)?;
        Ok(())
    }

    pub fn is_symmetric(&self) -> bool {
        self.lambda1 == self.lambda2 && self.beta1 == self.beta2
    }

    /// Total jump intensity `lambda1 + lambda2`.
    pub fn lambda(&self) -> f64 {
        self.lambda1 + self.lambda2
    }

    pub fn alpha1(&self) -> f64 {
        self.lambda1 / self.k
    }

    pub fn alpha2(&self) -> f64 {
        self.lambda2 / self.k
    }

    pub fn decay(&self, dt: f64) -> f64 {
        (-self.k * dt).exp()
    }

    pub fn remainder(&self, dt: f64) -> Result<BilateralRemainderParams> {
        BilateralRemainderParams::new(self.decay(dt), self.alpha1(), self.beta1, self.alpha2(), self.beta2)
    }

    /// Closed-form moments of `X(t0 + t)` given `X(t0) = x0`.
    pub fn moments_at(&self, t: f64) -> Moments {
        let r = BilateralRemainderParams {
            a: self.decay(t),
            alpha1: self.alpha1(),
            beta1: self.beta1,
            alpha2: self.alpha2(),
            beta2: self.beta2,
        };
        bgou_cumulants(&r).shifted(r.a * self.x0)
    }
}

/// Law of `Z_u - Z_d` for independent remainders `GAM''(alpha1, beta1)` and
/// `GAM''(alpha2, beta2)` sharing the decay factor `a`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BilateralRemainderParams {
    pub a: f64,
    pub alpha1: f64,
    pub beta1: f64,
    pub alpha2: f64,
    pub beta2: f64,
}

impl BilateralRemainderParams {
    pub fn new(a: f64, alpha1: f64, beta1: f64, alpha2: f64, beta2: f64) -> Result<Self> {
        let r = Self {
            a,
            alpha1,
            beta1,
            alpha2,
            beta2,
        };
        r.up()?;
        r.down()?;
        Ok(r)
    }

    pub fn up(&self) -> Result<RemainderParams> {
        RemainderParams::new(self.a, self.alpha1, self.beta1)
    }

    pub fn down(&self) -> Result<RemainderParams> {
        RemainderParams::new(self.a, self.alpha2, self.beta2)
    }

    /// Probability of no net movement, `a^(alpha1 + alpha2)`.
    pub fn atom(&self) -> f64 {
        self.a.powf(self.alpha1 + self.alpha2)
    }
}

/// Conditional characteristic function of `X(s + t)` given `X(s) = xs`.
pub fn chf_bgou_conditional(u: f64, t: f64, xs: f64, p: &BgouParams) -> Complex64 {
    let a = p.decay(t);
    let phase = Complex64::new(0.0, u * xs * a).exp();
    phase * remainder_factor(u, a, p.alpha1(), p.beta1) * remainder_factor(-u, a, p.alpha2(), p.beta2)
}

pub fn chf_bilateral_remainder(u: f64, r: &BilateralRemainderParams) -> Complex64 {
    remainder_factor(u, r.a, r.alpha1, r.beta1) * remainder_factor(-u, r.a, r.alpha2, r.beta2)
}

/// `kappa_n(Z_u) + (-1)^n kappa_n(Z_d)`.
pub fn bilateral_cumulant(n: u32, r: &BilateralRemainderParams) -> f64 {
    assert!(n >= 1, "cumulant order starts at 1");
    let n_f = f64::from(n);
    let lg = ln_gamma(n_f);
    let up = r.alpha1 * (lg - n_f * r.beta1.ln()).exp();
    let down = r.alpha2 * (lg - n_f * r.beta2.ln()).exp();
    let sign = if n.is_multiple_of(2) { 1.0 } else { -1.0 };
    -(n_f * r.a.ln()).exp_m1() * (up + sign * down)
}

pub fn bgou_cumulants(r: &BilateralRemainderParams) -> Moments {
    Moments::from_cumulants(
        bilateral_cumulant(1, r),
        bilateral_cumulant(2, r),
        bilateral_cumulant(3, r),
        bilateral_cumulant(4, r),
    )
}

/// Polya(`alpha`, `1 - a^2`) weights of the bilateral-Erlang mixture
/// representation of the symmetric remainder; `w_0 = a^(2 alpha)` is the atom.
pub fn symmetric_remainder_weights(alpha: f64, a: f64, n: usize) -> Result<MixtureWeights> {
    positive("alpha", alpha)?;
    if !(a > 0.0 && a < 1.0) {
        return Err(Error::Parameter {
            name: "a",
            value: a,
            reason: "must lie in (0, 1)",
        });
    }
    if n == 0 {
        return Err(Error::Domain("truncation must be at least 1".into()));
    }
    Ok(MixtureWeights::from_weights(polya_weights(alpha, 1.0 - a * a, n)))
}

/// Density of `Erlang(n, beta1) - Erlang(m, beta2)` at `x`.
///
/// # Panics
/// If `n` or `m` is zero.
pub fn erlang_difference_pdf(x: f64, n: u64, m: u64, beta1: f64, beta2: f64) -> f64 {
    assert!(n >= 1 && m >= 1, "Erlang shapes must be at least 1");
    if x < 0.0 {
        return erlang_difference_pdf(-x, m, n, beta2, beta1);
    }
    let ln_s = (beta1 + beta2).ln();
    let base = -beta1 * x - ln_factorial(m - 1) + n as f64 * beta1.ln() + m as f64 * beta2.ln();
    let ln_x = x.ln();
    let terms = (0..n).filter(|&j| j == 0 || x > 0.0).map(|j| {
        let mut t = base + ln_factorial(n + m - 2 - j)
            - ln_factorial(j)
            - ln_factorial(n - 1 - j)
            - (n + m - 1 - j) as f64 * ln_s;
        if j > 0 {
            t += j as f64 * ln_x;
        }
        t
    });
    let (mut max, mut sum) = (f64::NEG_INFINITY, 0.0);
    for t in terms {
        if t > max {
            sum = sum * (max - t).exp() + 1.0;
            max = t;
        } else {
            sum += (t - max).exp();
        }
    }
    if max == f64::NEG_INFINITY {
        0.0
    } else {
        (max + sum.ln()).exp()
    }
}
