//! Warton shrinkage of the copula correlation and its tuning rule.

use super::{CorrelationMatrix, EstimatorError, semibsl_logdensity_shrunk};
use crate::models::{simulate_batch, SimulatorModel};

/// Target standard deviation of the log-likelihood estimator.
pub const DEFAULT_TARGET_STD: f64 = 1.5;

/// `lambda * R + (1 - lambda) * I`.
pub fn warton_shrink(r: &CorrelationMatrix, lambda: f64) -> Result<CorrelationMatrix, EstimatorError> {
    if !(0.0..=1.0).contains(&lambda) {
        return Err(EstimatorError::InvalidShrinkage(lambda));
    }
    let d = r.dim();
    let mut m = r.matrix() * lambda;
    for i in 0..d {
        m[(i, i)] = 1.0;
    }
    Ok(CorrelationMatrix::from_matrix(m))
}

/// Per-lambda log-likelihood spread, as measured by [`tune_shrinkage`].
#[derive(Debug, Clone, PartialEq)]
pub struct ShrinkageTuning {
    pub lambda: f64,
    /// `(lambda, std)` for every grid point, in grid order. A `-inf`
    /// estimate makes the std infinite.
    pub profile: Vec<(f64, f64)>,
}

/// Picks the largest `lambda` in `grid` whose shrunk semiBSL log-likelihood
/// has standard deviation at most `target_std` over `replicates` fresh
/// batches of size `n` simulated at `theta`.
///
/// All grid points are scored on the same batches.
#[allow(clippy::too_many_arguments)]
pub fn tune_shrinkage<M: SimulatorModel>(
    model: &M,
    theta: &[f64],
    observed: &[f64],
    n: usize,
    target_std: f64,
    grid: &[f64],
    replicates: usize,
    seed: u64,
) -> Result<ShrinkageTuning, EstimatorError> {
    assert!(replicates >= 2, "need at least two replicates for a spread");
    for &l in grid {
        if !(0.0..=1.0).contains(&l) {
            return Err(EstimatorError::InvalidShrinkage(l));
        }
    }
    let batches: Vec<_> = (0..replicates)
        .map(|r| simulate_batch(model, theta, n, seed, r as u64))
        .collect();
    let mut profile = Vec::with_capacity(grid.len());
    for &lambda in grid {
        let values: Vec<f64> = batches
            .iter()
            .map(|b| match b {
                Ok(batch) => semibsl_logdensity_shrunk(batch, observed, lambda)
                    .map(|e| e.logvalue)
                    .unwrap_or(f64::NEG_INFINITY),
                Err(_) => f64::NEG_INFINITY,
            })
            .collect();
        profile.push((lambda, sample_std(&values)));
    }
    profile
        .iter()
        .filter(|(_, s)| *s <= target_std)
        .map(|&(l, _)| l)
        .fold(None, |best: Option<f64>, l| Some(best.map_or(l, |b| b.max(l))))
        .map(|lambda| ShrinkageTuning { lambda, profile: profile.clone() })
        .ok_or(EstimatorError::NoFeasibleLambda { target: target_std })
}

fn sample_std(values: &[f64]) -> f64 {
    if values.iter().any(|v| !v.is_finite()) {
        return f64::INFINITY;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}
