use serde::{Deserialize, Serialize};

/// Mean, variance, skewness and (non-excess) kurtosis of a law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Moments {
    pub mean: f64,
    pub variance: f64,
    pub skewness: f64,
    pub kurtosis: f64,
}

impl Moments {
    /// Builds the four summaries from the first four cumulants.
    pub fn from_cumulants(k1: f64, k2: f64, k3: f64, k4: f64) -> Self {
        Self {
            mean: k1,
            variance: k2,
            skewness: k3 / k2.powf(1.5),
            kurtosis: k4 / (k2 * k2) + 3.0,
        }
    }

    /// Same law translated by `shift` (only the mean moves).
    pub fn shifted(self, shift: f64) -> Self {
        Self {
            mean: self.mean + shift,
            ..self
        }
    }

    pub fn as_array(&self) -> [f64; 4] {
        [self.mean, self.variance, self.skewness, self.kurtosis]
    }
}
