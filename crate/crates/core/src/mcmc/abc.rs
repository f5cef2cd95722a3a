use nalgebra::{DMatrix, DVector};

use super::{run_metropolis, Chain, McmcError, ProposalSpec, DEFAULT_INIT_RETRIES};
use crate::estimators::StatisticBatch;
use crate::linalg::cholesky_with_jitter;
use crate::models::SimulatorModel;
use crate::rng::{stream, substream};

#[derive(Debug, Clone, PartialEq)]
pub struct AbcSettings {
    /// Mahalanobis tolerance; `f64::INFINITY` accepts every simulation.
    pub tolerance: f64,
    pub iterations: usize,
    pub theta0: Vec<f64>,
    pub seed: u64,
    pub init_retries: usize,
}

impl AbcSettings {
    pub fn new(tolerance: f64, iterations: usize, theta0: Vec<f64>, seed: u64) -> Self {
        AbcSettings { tolerance, iterations, theta0, seed, init_retries: DEFAULT_INIT_RETRIES }
    }
}

/// MCMC ABC with one simulation per proposal and an indicator kernel on the
/// Mahalanobis distance `sqrt((s - s_obs)' C^{-1} (s - s_obs))`.
///
/// The chain's `loglikes` column holds the log kernel value, always 0 for
/// retained states.
pub fn run_mcmc_abc<M: SimulatorModel + ?Sized>(
    model: &M,
    observed: &[f64],
    mahalanobis_cov: &DMatrix<f64>,
    proposal: &ProposalSpec,
    settings: &AbcSettings,
) -> Result<Chain, McmcError> {
    let d = model.stat_dim();
    if observed.len() != d {
        return Err(McmcError::DimensionMismatch { expected: d, found: observed.len() });
    }
    if mahalanobis_cov.nrows() != d || mahalanobis_cov.ncols() != d {
        return Err(McmcError::DimensionMismatch { expected: d, found: mahalanobis_cov.nrows() });
    }
    if !(settings.tolerance > 0.0) {
        return Err(McmcError::InvalidSetting(format!("tolerance must be positive, got {}", settings.tolerance)));
    }
    let chol = cholesky_with_jitter(mahalanobis_cov)
        .ok_or_else(|| McmcError::InvalidSetting("Mahalanobis covariance is not positive definite".into()))?;
    let obs = DVector::from_column_slice(observed);
    let tol2 = settings.tolerance * settings.tolerance;
    let seed = settings.seed;
    let target = |theta: &[f64], counter: u64| {
        if settings.tolerance == f64::INFINITY {
            return 0.0;
        }
        let mut rng = substream(seed, stream::SIMULATION, counter, 0);
        match model.simulate_stats(theta, &mut rng) {
            Ok(s) if s.iter().all(|v| v.is_finite()) => {
                let diff = DVector::from_vec(s) - &obs;
                if chol.inv_quad_form(&diff) <= tol2 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            _ => f64::NEG_INFINITY,
        }
    };
    let mut chain = run_metropolis(
        target,
        model.prior(),
        model.transform(),
        proposal,
        settings.iterations,
        &settings.theta0,
        seed,
        settings.init_retries,
    )?;
    chain.param_names = model.param_names().into_iter().map(String::from).collect();
    chain.method = "abc".to_string();
    chain.n_sim = 1;
    Ok(chain)
}

/// Sample covariance of simulated statistics after dropping rows with any
/// robust z-score (median / scaled MAD) above `z_threshold`.
pub fn mahalanobis_covariance(batch: &StatisticBatch, z_threshold: f64) -> Result<DMatrix<f64>, McmcError> {
    let (n, d) = (batch.n(), batch.d());
    let mut keep = vec![true; n];
    for j in 0..d {
        let col = batch.column(j);
        let med = median(col.to_vec());
        let mad = 1.482_602_218_505_602 * median(col.iter().map(|v| (v - med).abs()).collect());
        if mad > 0.0 {
            for (k, v) in keep.iter_mut().zip(col) {
                if ((v - med) / mad).abs() > z_threshold {
                    *k = false;
                }
            }
        }
    }
    let rows: Vec<usize> = (0..n).filter(|&i| keep[i]).collect();
    if rows.len() <= d {
        return Err(McmcError::InvalidSetting(format!("only {} rows left after outlier removal", rows.len())));
    }
    let x = batch.values().select_rows(&rows);
    let m = rows.len() as f64;
    let mean = x.row_mean();
    let centred = DMatrix::from_fn(rows.len(), d, |i, j| x[(i, j)] - mean[j]);
    Ok(centred.tr_mul(&centred) / (m - 1.0))
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_unstable_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
