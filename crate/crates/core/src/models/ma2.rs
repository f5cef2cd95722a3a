//! Second-order moving average `y_t = z_t + t1 z_{t-1} + t2 z_{t-2}`.
//!
//! The full series is used as the summary statistic.

use rand::Rng;
use rand_distr::StandardNormal;

use super::{ModelError, SimulatorModel};
use crate::mcmc::{Ma2TrianglePrior, ParameterTransform, Prior};
use crate::rng::SimRng;
use crate::special::HALF_LN_2PI;

pub fn ma2_in_support(theta: &[f64]) -> bool {
    let (t1, t2) = (theta[0], theta[1]);
    t2 > -1.0 && t2 < 1.0 && t1 + t2 > -1.0 && t1 - t2 < 1.0
}

fn check(theta: &[f64]) -> Result<(), ModelError> {
    if theta.len() == 2 && ma2_in_support(theta) {
        Ok(())
    } else {
        Err(ModelError::OutOfSupport { model: "ma2", theta: theta.to_vec() })
    }
}

/// Draws a series of length `len` from `len + 2` standard normal innovations.
pub fn ma2_simulate(theta: &[f64], len: usize, rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
    check(theta)?;
    let z: Vec<f64> = (0..len + 2).map(|_| rng.sample(StandardNormal)).collect();
    Ok((0..len).map(|t| z[t + 2] + theta[0] * z[t + 1] + theta[1] * z[t]).collect())
}

/// `(variance, lag-1 covariance, lag-2 covariance)` of the stationary series.
pub fn ma2_covariance_bands(theta: &[f64]) -> (f64, f64, f64) {
    let (t1, t2) = (theta[0], theta[1]);
    (1.0 + t1 * t1 + t2 * t2, t1 + t1 * t2, t2)
}

/// Exact Gaussian log-likelihood of `y` through a banded Cholesky factor of
/// the pentadiagonal Toeplitz covariance.
pub fn ma2_exact_loglike(theta: &[f64], y: &[f64]) -> Result<f64, ModelError> {
    check(theta)?;
    let (c0, c1, c2) = ma2_covariance_bands(theta);
    let n = y.len();
    // l0[i] = L[i][i], l1[i] = L[i][i-1], l2[i] = L[i][i-2]
    let mut l0 = vec![0.0; n];
    let mut l1 = vec![0.0; n];
    let mut l2 = vec![0.0; n];
    let mut w = vec![0.0; n];
    let mut logdet_half = 0.0;
    let mut quad = 0.0;
    for i in 0..n {
        if i >= 2 {
            l2[i] = c2 / l0[i - 2];
        }
        if i >= 1 {
            let cross = if i >= 2 { l2[i] * l1[i - 1] } else { 0.0 };
            l1[i] = (c1 - cross) / l0[i - 1];
        }
        let diag = c0 - l1[i] * l1[i] - l2[i] * l2[i];
        if !(diag > 0.0) {
            return Err(ModelError::OutOfSupport { model: "ma2", theta: theta.to_vec() });
        }
        l0[i] = diag.sqrt();
        let mut r = y[i];
        if i >= 1 {
            r -= l1[i] * w[i - 1];
        }
        if i >= 2 {
            r -= l2[i] * w[i - 2];
        }
        w[i] = r / l0[i];
        logdet_half += l0[i].ln();
        quad += w[i] * w[i];
    }
    Ok(-(n as f64) * HALF_LN_2PI - logdet_half - 0.5 * quad)
}

/// MA(2) with a uniform prior on the invertibility triangle. The random walk
/// runs in the original space; proposals outside the triangle are rejected
/// by the prior.
#[derive(Debug, Clone)]
pub struct Ma2 {
    pub len: usize,
    prior: Ma2TrianglePrior,
    transform: ParameterTransform,
}

impl Ma2 {
    pub const TRUE_PARAMS: [f64; 2] = [0.6, 0.2];

    pub fn new(len: usize) -> Self {
        Ma2 { len, prior: Ma2TrianglePrior, transform: ParameterTransform::identity(2) }
    }
}

impl Default for Ma2 {
    fn default() -> Self {
        Ma2::new(50)
    }
}

impl SimulatorModel for Ma2 {
    type Data = Vec<f64>;

    fn name(&self) -> &'static str {
        "ma2"
    }
    fn param_names(&self) -> Vec<&'static str> {
        vec!["theta1", "theta2"]
    }
    fn stat_dim(&self) -> usize {
        self.len
    }
    fn simulate(&self, theta: &[f64], rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
        ma2_simulate(theta, self.len, rng)
    }
    fn summarize(&self, data: &Vec<f64>) -> Result<Vec<f64>, ModelError> {
        Ok(data.clone())
    }
    fn prior(&self) -> &dyn Prior {
        &self.prior
    }
    fn transform(&self) -> &ParameterTransform {
        &self.transform
    }
    fn true_params(&self) -> Option<Vec<f64>> {
        Some(Self::TRUE_PARAMS.to_vec())
    }
}
