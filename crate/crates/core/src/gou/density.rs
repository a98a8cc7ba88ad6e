use super::{integer_shape, remainder_cumulant, GouParams};
use crate::error::{positive, Error, Result};
use crate::law::TransitionDensity;
use crate::special::{ln_factorial, ln_factorial_table, ln_gamma};

/// Transition law of `X(s + t)` given `X(s) = y`: an atom `a^alpha` at
/// `a y` plus a truncated Erlang mixture above it.
#[derive(Debug, Clone)]
pub struct GouTransition {
    atom_location: f64,
    atom_prob: f64,
    tail_mass: f64,
    /// `ln w_k` for `k = 1..=N`, stored at index `k - 1`.
    ln_weights: Vec<f64>,
    /// `ln (k-1)!` at index `k - 1`.
    ln_fact: Vec<f64>,
    rate: f64,
    scale: f64,
    binomial: bool,
}

impl GouTransition {
    pub fn new(t: f64, y: f64, p: &GouParams, truncation: usize) -> Result<Self> {
        p.validate()?;
        positive("t", t)?;
        if truncation == 0 {
            return Err(Error::Domain("truncation must be at least 1".into()));
        }
        let a = p.decay(t);
        let atom_location = a * y;
        if p.lambda == 0.0 {
            return Ok(Self {
                atom_location,
                atom_prob: 1.0,
                tail_mass: 0.0,
                ln_weights: Vec::new(),
                ln_fact: Vec::new(),
                rate: p.beta,
                scale: 1.0,
                binomial: false,
            });
        }
        let r = p.remainder(t)?;
        let scale = remainder_cumulant(2, &r).sqrt().max(f64::MIN_POSITIVE);
        let (ln_a, ln_1ma) = (a.ln(), (-a).ln_1p());
        if let Some(n) = integer_shape(r.alpha) {
            let ln_weights: Vec<f64> = (1..=n)
                .map(|k| {
                    ln_factorial(n) - ln_factorial(k) - ln_factorial(n - k)
                        + (n - k) as f64 * ln_a
                        + k as f64 * ln_1ma
                })
                .collect();
            return Ok(Self {
                atom_location,
                atom_prob: (n as f64 * ln_a).exp(),
                tail_mass: 0.0,
                ln_fact: ln_factorial_table(ln_weights.len()),
                ln_weights,
                rate: r.beta,
                scale,
                binomial: true,
            });
        }
        let ln_weights: Vec<f64> = (1..=truncation)
            .map(|k| {
                let kf = k as f64;
                ln_gamma(r.alpha + kf) - ln_gamma(r.alpha) - ln_factorial(k as u64)
                    + r.alpha * ln_a
                    + kf * ln_1ma
            })
            .collect();
        let atom_prob = r.atom();
        let kept: f64 = ln_weights.iter().map(|l| l.exp()).sum();
        Ok(Self {
            atom_location,
            atom_prob,
            tail_mass: (1.0 - atom_prob - kept).max(0.0),
            ln_fact: ln_factorial_table(truncation),
            ln_weights,
            rate: r.beta / r.a,
            scale,
            binomial: false,
        })
    }

    /// Whether the finite binomial mixture (integer `lambda / k`) is in use.
    pub fn is_binomial(&self) -> bool {
        self.binomial
    }

    /// Density of the remainder's continuous part at `z = x - a y`.
    fn remainder_density(&self, z: f64) -> f64 {
        if z < 0.0 || self.ln_weights.is_empty() {
            return 0.0;
        }
        let ln_r = self.rate.ln();
        if z == 0.0 {
            return (self.ln_weights[0] + ln_r).exp();
        }
        let ln_z = z.ln();
        let term = |i: usize| {
            let k = (i + 1) as f64;
            self.ln_weights[i] + k * ln_r + (k - 1.0) * ln_z - self.rate * z - self.ln_fact[i]
        };
        let n = self.ln_weights.len();
        let max = (0..n).map(term).fold(f64::NEG_INFINITY, f64::max);
        if !max.is_finite() {
            return 0.0;
        }
        let sum: f64 = (0..n).map(|i| (term(i) - max).exp()).sum();
        (max + sum.ln()).exp()
    }
}

impl TransitionDensity for GouTransition {
    fn atom_location(&self) -> f64 {
        self.atom_location
    }
    fn atom_prob(&self) -> f64 {
        self.atom_prob
    }
    fn density(&self, x: f64) -> f64 {
        self.remainder_density(x - self.atom_location)
    }
    fn tail_mass(&self) -> f64 {
        self.tail_mass
    }
    fn scale(&self) -> f64 {
        self.scale
    }
    fn support(&self) -> (f64, f64) {
        (self.atom_location, f64::INFINITY)
    }
}

/// `(atom_prob, density(x))` of `X(s + t)` given `X(s) = y`.
pub fn transition_density_gou(
    x: f64,
    t: f64,
    y: f64,
    p: &GouParams,
    truncation: usize,
) -> Result<(f64, f64)> {
    let d = GouTransition::new(t, y, p, truncation)?;
    Ok((d.atom_prob(), d.density(x)))
}
