//! Small numerical helpers shared by the density and weight code.

pub use statrs::function::gamma::ln_gamma;

/// `ln((k)!)` for non-negative integer `k`.
pub fn ln_factorial(k: u64) -> f64 {
    if k < 2 {
        0.0
    } else {
        ln_gamma(k as f64 + 1.0)
    }
}

/// Stable `ln(sum(exp(x_i)))`; returns `-inf` for an empty or all `-inf` input.
pub fn log_sum_exp(terms: &[f64]) -> f64 {
    let max = terms.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if max == f64::NEG_INFINITY {
        return max;
    }
    max + terms.iter().map(|t| (t - max).exp()).sum::<f64>().ln()
}

/// Table of `ln(j!)` for `j = 0..=n`.
pub(crate) fn ln_factorial_table(n: usize) -> Vec<f64> {
    let mut t = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    t.push(0.0);
    for j in 1..=n {
        acc += (j as f64).ln();
        t.push(acc);
    }
    t
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lse_matches_direct_sum() {
        let xs = [0.1f64.ln(), 0.2f64.ln(), 0.7f64.ln()];
        assert!((log_sum_exp(&xs)).abs() < 1e-15);
        assert_eq!(log_sum_exp(&[]), f64::NEG_INFINITY);
        assert!((log_sum_exp(&[1000.0, 1000.0]) - (1000.0 + 2f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn factorial_table_agrees_with_ln_gamma() {
        let t = ln_factorial_table(60);
        for (j, v) in t.iter().enumerate() {
            assert!((v - ln_factorial(j as u64)).abs() < 1e-9 * v.max(1.0));
        }
    }
}
