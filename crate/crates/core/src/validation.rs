//! Moment estimators, empirical characteristic functions and goodness-of-fit
//! tests against the closed-form laws.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::error::{Error, Result};
use crate::law::TransitionDensity;
use crate::moments::Moments;

/// Sample moments with asymptotic standard errors.
///
/// Standard errors come from the delta method applied to the joint
/// asymptotic covariance of the sample central moments, so they remain
/// valid for the heavy-tailed laws produced by short time steps.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub n_samples: usize,
    pub mean: f64,
    /// Unbiased.
    pub variance: f64,
    pub skewness: f64,
    /// Non-excess (3 for a normal law).
    pub kurtosis: f64,
    /// Standard errors of mean, variance, skewness and kurtosis.
    pub standard_errors: [f64; 4],
    /// All samples equal: skewness, kurtosis and their errors are NaN.
    pub degenerate: bool,
}

impl SummaryStats {
    pub fn as_moments(&self) -> Moments {
        Moments {
            mean: self.mean,
            variance: self.variance,
            skewness: self.skewness,
            kurtosis: self.kurtosis,
        }
    }

    /// `(estimate - oracle) / s.e.` for each of the four moments.
    pub fn deltas(&self, oracle: &Moments) -> [f64; 4] {
        let est = self.as_moments().as_array();
        let ora = oracle.as_array();
        std::array::from_fn(|i| (est[i] - ora[i]) / self.standard_errors[i])
    }

    /// Every moment within `n_se` standard errors of the oracle.
    pub fn agrees_with(&self, oracle: &Moments, n_se: f64) -> bool {
        self.deltas(oracle).iter().all(|d| d.abs() <= n_se)
    }
}

pub fn summarize(samples: &[f64]) -> Result<SummaryStats> {
    let n = samples.len();
    if n < 2 {
        return Err(Error::Input(format!("need at least two samples, got {n}")));
    }
    let nf = n as f64;
    let mean = samples.iter().sum::<f64>() / nf;
    // mu[r] = (1/n) sum (x - mean)^r for r = 0..=8
    let mut mu = [0.0f64; 9];
    for &x in samples {
        let d = x - mean;
        let mut p = 1.0;
        for m in mu.iter_mut().skip(1) {
            p *= d;
            *m += p;
        }
    }
    for m in mu.iter_mut() {
        *m /= nf;
    }
    mu[0] = 1.0;
    let m2 = mu[2];
    let variance = m2 * nf / (nf - 1.0);
    let se_mean = (variance / nf).sqrt();
    let cov = |r: usize, s: usize| -> f64 {
        let (rf, sf) = (r as f64, s as f64);
        (mu[r + s] - mu[r] * mu[s] - rf * mu[r - 1] * mu[s + 1] - sf * mu[r + 1] * mu[s - 1]
            + rf * sf * mu[r - 1] * mu[s - 1] * mu[2])
            / nf
    };
    let se_var = cov(2, 2).max(0.0).sqrt();
    if m2 == 0.0 {
        return Ok(SummaryStats {
            n_samples: n,
            mean,
            variance: 0.0,
            skewness: f64::NAN,
            kurtosis: f64::NAN,
            standard_errors: [se_mean, se_var, f64::NAN, f64::NAN],
            degenerate: true,
        });
    }
    let skewness = mu[3] / m2.powf(1.5);
    let kurtosis = mu[4] / (m2 * m2);
    let quad_form = |g: [f64; 2], idx: [usize; 2]| {
        g[0] * g[0] * cov(idx[0], idx[0])
            + 2.0 * g[0] * g[1] * cov(idx[0], idx[1])
            + g[1] * g[1] * cov(idx[1], idx[1])
    };
    let g_skew = [-1.5 * mu[3] / m2.powf(2.5), 1.0 / m2.powf(1.5)];
    let g_kurt = [-2.0 * mu[4] / (m2 * m2 * m2), 1.0 / (m2 * m2)];
    let se_skew = quad_form(g_skew, [2, 3]).max(0.0).sqrt();
    let se_kurt = quad_form(g_kurt, [2, 4]).max(0.0).sqrt();
    Ok(SummaryStats {
        n_samples: n,
        mean,
        variance,
        skewness,
        kurtosis,
        standard_errors: [se_mean, se_var, se_skew, se_kurt],
        degenerate: false,
    })
}

/// `(1/N) sum_j exp(i u x_j)` at every `u` in `u_grid`.
pub fn empirical_chf(samples: &[f64], u_grid: &[f64]) -> Vec<Complex64> {
    let nf = samples.len() as f64;
    u_grid
        .iter()
        .map(|&u| {
            let (mut re, mut im) = (0.0, 0.0);
            for &x in samples {
                if x == 0.0 {
                    re += 1.0;
                } else {
                    let (s, c) = (u * x).sin_cos();
                    re += c;
                    im += s;
                }
            }
            Complex64::new(re / nf, im / nf)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChfReport {
    pub n_samples: usize,
    pub u_grid: Vec<f64>,
    pub max_abs_error: f64,
    /// Grid point of the largest deviation.
    pub worst_u: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Uniform comparison of the empirical CF with `chf` on `u_grid`, with
/// tolerance `4 / sqrt(N)`.
pub fn chf_check<F: Fn(f64) -> Complex64>(samples: &[f64], u_grid: &[f64], chf: F) -> ChfReport {
    let emp = empirical_chf(samples, u_grid);
    let (mut worst_u, mut max_abs_error) = (f64::NAN, 0.0);
    for (e, &u) in emp.iter().zip(u_grid) {
        let d = (e - chf(u)).norm();
        if d >= max_abs_error {
            max_abs_error = d;
            worst_u = u;
        }
    }
    let tolerance = 4.0 / (samples.len() as f64).sqrt();
    ChfReport {
        n_samples: samples.len(),
        u_grid: u_grid.to_vec(),
        max_abs_error,
        worst_u,
        tolerance,
        pass: max_abs_error < tolerance,
    }
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KsReport {
    pub n1: usize,
    pub n2: usize,
    pub statistic: f64,
    pub p_value: f64,
    pub level: f64,
    pub pass: bool,
}

/// Kolmogorov survival function `Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2)`.
fn kolmogorov_sf(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for j in 1..=100 {
        let jf = f64::from(j);
        let term = (-2.0 * jf * jf * lambda * lambda).exp();
        sum += sign * term;
        if term < 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov test. Tied values are stepped over
/// together, so atoms shared by both samples do not inflate the statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64], level: f64) -> Result<KsReport> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Input("KS test needs two non-empty samples".into()));
    }
    if a.iter().chain(b).any(|x| x.is_nan()) {
        return Err(Error::Input("KS test samples contain NaN".into()));
    }
    let mut x = a.to_vec();
    let mut y = b.to_vec();
    x.sort_unstable_by(f64::total_cmp);
    y.sort_unstable_by(f64::total_cmp);
    let (n1, n2) = (x.len(), y.len());
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < n1 && j < n2 {
        let v = x[i].min(y[j]);
        while i < n1 && x[i] == v {
            i += 1;
        }
        while j < n2 && y[j] == v {
            j += 1;
        }
        d = d.max((i as f64 / n1 as f64 - j as f64 / n2 as f64).abs());
    }
    let ne = (n1 as f64 * n2 as f64) / (n1 + n2) as f64;
    let sq = ne.sqrt();
    let p_value = kolmogorov_sf((sq + 0.12 + 0.11 / sq) * d);
    Ok(KsReport {
        n1,
        n2,
        statistic: d,
        p_value,
        level,
        pass: p_value > level,
    })
}

/// Upper tail of the chi-square law with `df` degrees of freedom.
pub fn chi_square_sf(statistic: f64, df: usize) -> f64 {
    match ChiSquared::new(df as f64) {
        Ok(d) => d.sf(statistic),
        Err(_) => f64::NAN,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AtomTest {
    pub location: f64,
    pub observed: usize,
    pub n_samples: usize,
    pub expected_prob: f64,
    /// `(observed - n p) / sqrt(n p (1 - p))`.
    pub z: f64,
    pub p_value: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinCount {
    pub lo: f64,
    pub hi: f64,
    pub observed: usize,
    pub expected: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChiSquareTest {
    pub n_samples: usize,
    pub bins: Vec<BinCount>,
    pub statistic: f64,
    pub df: usize,
    pub p_value: f64,
    /// Bins merged into a neighbour because their expected count was below
    /// the minimum.
    pub collapsed_bins: usize,
    pub pass: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GofReport {
    pub level: f64,
    pub atom: AtomTest,
    /// `None` when there are too few continuous samples to bin.
    pub continuous: Option<ChiSquareTest>,
    /// Truncation tail of the reference law.
    pub reference_tail_mass: f64,
    pub pass: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GofOptions {
    pub n_bins: usize,
    pub level: f64,
    /// Bins expecting fewer samples are merged with a neighbour.
    pub min_expected: f64,
    /// Absolute quadrature tolerance for bin probabilities.
    pub quad_tol: f64,
}

impl Default for GofOptions {
    fn default() -> Self {
        Self {
            n_bins: 50,
            level: 0.01,
            min_expected: 5.0,
            quad_tol: 1e-11,
        }
    }
}

fn two_sided_normal_p(z: f64) -> f64 {
    statrs::function::erf::erfc(z.abs() / std::f64::consts::SQRT_2)
}

/// Goodness of fit of `samples` to a mixed law: a proportion test for the
/// atom (exact equality with the atom location) and a chi-square test of
/// the remaining samples against the normalized continuous part. Bin edges
/// are sample quantiles of the continuous samples; the outer bins extend to
/// the ends of the support.
pub fn gof_mixed<L: TransitionDensity + ?Sized>(
    samples: &[f64],
    law: &L,
    options: &GofOptions,
) -> Result<GofReport> {
    let p_atom = law.atom_prob();
    if !(0.0..=1.0).contains(&p_atom) {
        return Err(Error::Input(format!("atom probability {p_atom} outside [0, 1]")));
    }
    if samples.is_empty() {
        return Err(Error::Input("goodness of fit needs samples".into()));
    }
    let loc = law.atom_location();
    let n = samples.len();
    let mut cont: Vec<f64> = samples.iter().copied().filter(|&x| x != loc).collect();
    let observed = n - cont.len();

    let nf = n as f64;
    let atom = if p_atom <= 0.0 || p_atom >= 1.0 {
        let expected = (p_atom * nf).round() as usize;
        AtomTest {
            location: loc,
            observed,
            n_samples: n,
            expected_prob: p_atom,
            z: if observed == expected { 0.0 } else { f64::INFINITY },
            p_value: if observed == expected { 1.0 } else { 0.0 },
            pass: observed == expected,
        }
    } else {
        let z = (observed as f64 - nf * p_atom) / (nf * p_atom * (1.0 - p_atom)).sqrt();
        let p_value = two_sided_normal_p(z);
        AtomTest {
            location: loc,
            observed,
            n_samples: n,
            expected_prob: p_atom,
            z,
            p_value,
            pass: p_value > options.level,
        }
    };

    let continuous = if cont.len() >= 2 && options.n_bins >= 2 {
        cont.sort_unstable_by(f64::total_cmp);
        Some(binned_chi_square(&cont, law, options))
    } else {
        None
    };
    let pass = atom.pass && continuous.as_ref().is_none_or(|c| c.pass);
    Ok(GofReport {
        level: options.level,
        atom,
        continuous,
        reference_tail_mass: law.tail_mass(),
        pass,
    })
}

fn binned_chi_square<L: TransitionDensity + ?Sized>(
    sorted: &[f64],
    law: &L,
    options: &GofOptions,
) -> ChiSquareTest {
    let nc = sorted.len();
    let (s_lo, s_hi) = law.support();
    let mut edges = vec![s_lo];
    for b in 1..options.n_bins {
        let q = sorted[b * nc / options.n_bins];
        if q > *edges.last().unwrap() && q < s_hi {
            edges.push(q);
        }
    }
    edges.push(s_hi);

    let tol = options.quad_tol;
    let masses: Vec<f64> = edges
        .windows(2)
        .map(|w| law.continuous_mass(w[0], w[1], tol))
        .collect();
    let total: f64 = masses.iter().sum();
    let mut bins: Vec<BinCount> = Vec::with_capacity(masses.len());
    let mut start = 0usize;
    for (w, mass) in edges.windows(2).zip(&masses) {
        // counts in [lo, hi) except the last bin, which is closed
        let end = if w[1] == s_hi {
            nc
        } else {
            sorted.partition_point(|&x| x < w[1])
        };
        bins.push(BinCount {
            lo: w[0],
            hi: w[1],
            observed: end - start,
            expected: nc as f64 * mass / total,
        });
        start = end;
    }

    let before = bins.len();
    let mut merged: Vec<BinCount> = Vec::with_capacity(before);
    for b in bins {
        match merged.last_mut() {
            Some(last) if last.expected < options.min_expected => {
                last.hi = b.hi;
                last.observed += b.observed;
                last.expected += b.expected;
            }
            _ => merged.push(b),
        }
    }
    if merged.len() > 1 && merged.last().unwrap().expected < options.min_expected {
        let tail = merged.pop().unwrap();
        let last = merged.last_mut().unwrap();
        last.hi = tail.hi;
        last.observed += tail.observed;
        last.expected += tail.expected;
    }
    let collapsed_bins = before - merged.len();

    let statistic: f64 = merged
        .iter()
        .map(|b| {
            let d = b.observed as f64 - b.expected;
            d * d / b.expected
        })
        .sum();
    let df = merged.len().saturating_sub(1);
    let p_value = if df == 0 { 1.0 } else { chi_square_sf(statistic, df) };
    ChiSquareTest {
        n_samples: nc,
        bins: merged,
        statistic,
        df,
        p_value,
        collapsed_bins,
        pass: p_value > options.level,
    }
}
