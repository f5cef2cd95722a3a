//! Gaussian-kernel density estimates of a single statistic.

use super::EstimatorError;
use crate::special::{norm_cdf, norm_pdf};

/// CDF values are clamped to `[CDF_CLAMP, 1 - CDF_CLAMP]` before any
/// inverse-normal map.
pub const CDF_CLAMP: f64 = 1e-12;

/// Quantile of sorted data by linear interpolation between order
/// statistics (Hyndman & Fan type 7, the R default).
pub fn type7_quantile(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    debug_assert!(n > 0 && (0.0..=1.0).contains(&p));
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

fn sample_sd(samples: &[f64]) -> f64 {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let ss = samples.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>();
    (ss / (n - 1.0)).sqrt()
}

fn silverman_from_sorted(sorted: &[f64]) -> Result<f64, EstimatorError> {
    let n = sorted.len();
    let sd = sample_sd(sorted);
    let iqr = type7_quantile(sorted, 0.75) - type7_quantile(sorted, 0.25);
    // like R's bw.nrd0, a zero IQR falls back to the standard deviation
    let spread = match (sd > 0.0, iqr > 0.0) {
        (true, true) => sd.min(iqr / 1.34),
        (true, false) => sd,
        (false, true) => iqr / 1.34,
        (false, false) => return Err(EstimatorError::ZeroDispersion),
    };
    let h = 0.9 * (n as f64).powf(-0.2) * spread;
    if h > 0.0 && h.is_finite() {
        Ok(h)
    } else {
        Err(EstimatorError::ZeroDispersion)
    }
}

/// Silverman's rule of thumb, `0.9 n^(-1/5) min(sd, IQR / 1.34)`.
pub fn silverman_bandwidth(samples: &[f64]) -> Result<f64, EstimatorError> {
    if samples.len() < 3 {
        return Err(EstimatorError::InvalidBatch(format!(
            "bandwidth needs at least 3 samples, got {}",
            samples.len()
        )));
    }
    let mut sorted = samples.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    silverman_from_sorted(&sorted)
}

/// Kernel density estimate with a Gaussian kernel; the CDF uses the same
/// bandwidth.
#[derive(Debug, Clone, PartialEq)]
pub struct KdeMarginal {
    samples: Vec<f64>,
    bandwidth: f64,
}

impl KdeMarginal {
    /// Fits with the Silverman bandwidth.
    pub fn fit(samples: &[f64]) -> Result<Self, EstimatorError> {
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Self::fit_sorted(sorted)
    }

    pub(crate) fn fit_sorted(sorted: Vec<f64>) -> Result<Self, EstimatorError> {
        if sorted.len() < 3 {
            return Err(EstimatorError::InvalidBatch(format!(
                "bandwidth needs at least 3 samples, got {}",
                sorted.len()
            )));
        }
        let bandwidth = silverman_from_sorted(&sorted)?;
        Ok(KdeMarginal { samples: sorted, bandwidth })
    }

    pub fn with_bandwidth(samples: &[f64], bandwidth: f64) -> Result<Self, EstimatorError> {
        if samples.is_empty() || !(bandwidth > 0.0) || !bandwidth.is_finite() {
            return Err(EstimatorError::ZeroDispersion);
        }
        let mut sorted = samples.to_vec();
        sorted.sort_unstable_by(f64::total_cmp);
        Ok(KdeMarginal { samples: sorted, bandwidth })
    }

    pub fn bandwidth(&self) -> f64 {
        self.bandwidth
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn pdf(&self, x: f64) -> f64 {
        self.pdf_cdf(x).0
    }

    /// Unclamped CDF estimate.
    pub fn cdf(&self, x: f64) -> f64 {
        self.pdf_cdf(x).1
    }

    pub fn clamped_cdf(&self, x: f64) -> f64 {
        self.cdf(x).clamp(CDF_CLAMP, 1.0 - CDF_CLAMP)
    }

    /// Density and CDF at `x` in one pass over the samples.
    ///
    /// The density is summed on the linear scale, so an observation far
    /// outside every kernel underflows to exactly zero.
    pub fn pdf_cdf(&self, x: f64) -> (f64, f64) {
        let inv_h = 1.0 / self.bandwidth;
        let mut dens = 0.0;
        let mut cum = 0.0;
        for &xi in &self.samples {
            let z = (x - xi) * inv_h;
            dens += norm_pdf(z);
            cum += norm_cdf(z);
        }
        let n = self.samples.len() as f64;
        (dens * inv_h / n, (cum / n).clamp(0.0, 1.0))
    }
}
