use super::{bilateral_cumulant, BgouParams};
use crate::error::{positive, Error, Result};
use crate::gou::polya_weights;
use crate::law::TransitionDensity;
use crate::special::ln_factorial_table;

/// One half-line of the remainder density:
/// `f(x) = rate * sum_j coeff[j] * Poisson(j; rate |x|)`.
///
/// Every `Erlang(n, r1) - Erlang(m, r2)` density restricted to `x > 0`
/// equals `r1 P{Poisson(r1 x) + NegBin(m, r2/(r1+r2)) = n - 1}`, so the
/// truncated double series over `(n, m)` folds into one coefficient per
/// Poisson count.
#[derive(Debug, Clone)]
struct HalfLine {
    rate: f64,
    ln_coeff: Vec<f64>,
}

impl HalfLine {
    /// `near` are the weights of the side the half-line points to, `far`
    /// those of the opposite side; `q = far_rate / (near_rate + far_rate)`.
    fn new(near: &[f64], far: &[f64], rate: f64, q: f64) -> Self {
        let n = near.len() - 1;
        // pi[i] = sum_{m>=1} far[m] C(m-1+i, i) q^m (1-q)^i
        let mut pi = vec![0.0; n];
        let mut q_pow = 1.0;
        for (m, &w) in far.iter().enumerate().skip(1) {
            q_pow *= q;
            let mut t = q_pow;
            for (i, p) in pi.iter_mut().enumerate() {
                *p += w * t;
                t *= (m + i) as f64 / (i as f64 + 1.0) * (1.0 - q);
            }
        }
        let ln_coeff = (0..n)
            .map(|j| {
                let mut c = far[0] * near[j + 1];
                for (i, p) in pi.iter().enumerate().take(n - j) {
                    c += near[i + j + 1] * p;
                }
                c.ln()
            })
            .collect();
        Self { rate, ln_coeff }
    }

    fn density(&self, x: f64, ln_fact: &[f64]) -> f64 {
        let y = self.rate * x;
        if y == 0.0 {
            return self.rate * self.ln_coeff[0].exp();
        }
        let ln_y = y.ln();
        let sum: f64 = self
            .ln_coeff
            .iter()
            .enumerate()
            .map(|(j, c)| (c + j as f64 * ln_y - y - ln_fact[j]).exp())
            .sum();
        self.rate * sum
    }
}

/// Transition law of a BGOU process: atom `a^(alpha1+alpha2)` at `a y`
/// plus a two-sided continuous part.
#[derive(Debug, Clone)]
pub struct BgouTransition {
    atom_location: f64,
    atom_prob: f64,
    tail_mass: f64,
    up: HalfLine,
    down: HalfLine,
    ln_fact: Vec<f64>,
    scale: f64,
}

impl BgouTransition {
    pub fn new(t: f64, y: f64, p: &BgouParams, truncation: usize) -> Result<Self> {
        p.validate()?;
        positive("t", t)?;
        if truncation == 0 {
            return Err(Error::Domain("truncation must be at least 1".into()));
        }
        let r = p.remainder(t)?;
        let b = polya_weights(r.alpha1, 1.0 - r.a, truncation);
        let c = polya_weights(r.alpha2, 1.0 - r.a, truncation);
        let (r1, r2) = (r.beta1 / r.a, r.beta2 / r.a);
        let q_up = r.beta2 / (r.beta1 + r.beta2);
        let kept = b.iter().sum::<f64>() * c.iter().sum::<f64>();
        Ok(Self {
            atom_location: r.a * y,
            atom_prob: r.atom(),
            tail_mass: (1.0 - kept).max(0.0),
            up: HalfLine::new(&b, &c, r1, q_up),
            down: HalfLine::new(&c, &b, r2, 1.0 - q_up),
            ln_fact: ln_factorial_table(truncation),
            scale: bilateral_cumulant(2, &r).sqrt(),
        })
    }
}

impl TransitionDensity for BgouTransition {
    fn atom_location(&self) -> f64 {
        self.atom_location
    }
    fn atom_prob(&self) -> f64 {
        self.atom_prob
    }
    fn density(&self, x: f64) -> f64 {
        let z = x - self.atom_location;
        if z >= 0.0 {
            self.up.density(z, &self.ln_fact)
        } else {
            self.down.density(-z, &self.ln_fact)
        }
    }
    fn tail_mass(&self) -> f64 {
        self.tail_mass
    }
    fn scale(&self) -> f64 {
        self.scale
    }
    fn support(&self) -> (f64, f64) {
        (f64::NEG_INFINITY, f64::INFINITY)
    }
}

/// `(atom_prob, density(x))` of `X(s + t)` given `X(s) = y`.
pub fn transition_density_bgou(
    x: f64,
    t: f64,
    y: f64,
    p: &BgouParams,
    truncation: usize,
) -> Result<(f64, f64)> {
    let d = BgouTransition::new(t, y, p, truncation)?;
    Ok((d.atom_prob(), d.density(x)))
}
