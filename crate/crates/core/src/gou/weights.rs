use serde::Serialize;

use super::RemainderParams;
use crate::error::{Error, Result};

/// Truncated (possibly signed) mixture weights `w_0..=w_N`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MixtureWeights {
    pub weights: Vec<f64>,
    /// `c = sum(max(w_k, 0))`.
    pub positive_mass: f64,
    /// `max(w_k, 0) / c`.
    pub normalized_probs: Vec<f64>,
    pub truncation: usize,
    /// `1 - sum(w_k)` over the retained terms.
    pub tail_mass: f64,
}

impl MixtureWeights {
    pub(crate) fn from_weights(weights: Vec<f64>) -> Self {
        let positive_mass: f64 = weights.iter().map(|w| w.max(0.0)).sum();
        let normalized_probs = weights.iter().map(|w| w.max(0.0) / positive_mass).collect();
        let total: f64 = weights.iter().sum();
        Self {
            truncation: weights.len() - 1,
            tail_mass: 1.0 - total,
            weights,
            positive_mass,
            normalized_probs,
        }
    }

    pub fn acceptance_rate(&self) -> f64 {
        1.0 / self.positive_mass
    }
}

/// Polya pmf `C(alpha+k-1, k) (1-p)^alpha p^k` for `k = 0..=n` by recursion.
pub(crate) fn polya_weights(alpha: f64, p: f64, n: usize) -> Vec<f64> {
    let mut w = Vec::with_capacity(n + 1);
    let mut cur = (alpha * (-p).ln_1p()).exp();
    w.push(cur);
    for k in 0..n {
        cur *= (alpha + k as f64) / (k as f64 + 1.0) * p;
        w.push(cur);
    }
    w
}

/// Generalised-binomial weights `C(alpha, k) a^(alpha-k) (1-a)^k`.
pub(crate) fn pseudo_weights(a: f64, alpha: f64, n: usize) -> Vec<f64> {
    let ratio = (1.0 - a) / a;
    let mut w = Vec::with_capacity(n + 1);
    let mut cur = a.powf(alpha);
    w.push(cur);
    for k in 0..n {
        cur *= (alpha - k as f64) / (k as f64 + 1.0) * ratio;
        w.push(cur);
    }
    w
}

/// Polya(`alpha`, `1-a`) weights of the Erlang(`k`, `beta/a`) mixture
/// representation of the remainder.
pub fn polya_mixture_weights(r: &RemainderParams, n: usize) -> Result<MixtureWeights> {
    if n == 0 {
        return Err(Error::Domain("truncation must be at least 1".into()));
    }
    Ok(MixtureWeights::from_weights(polya_weights(r.alpha, 1.0 - r.a, n)))
}

/// Signed weights of the Erlang(`k`, `beta`) pseudo-mixture, valid for `a >= 1/2`.
pub fn pseudo_mixture_weights(r: &RemainderParams, n: usize) -> Result<MixtureWeights> {
    if n == 0 {
        return Err(Error::Domain("truncation must be at least 1".into()));
    }
    if r.a < 0.5 {
        return Err(Error::Domain(format!(
            "pseudo-mixture expansion requires a >= 1/2 (got a = {})",
            r.a
        )));
    }
    Ok(MixtureWeights::from_weights(pseudo_weights(r.a, r.alpha, n)))
}
