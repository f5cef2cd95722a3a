//! Synthetic-likelihood density estimators.
//!
//! Every estimator consumes a [`StatisticBatch`] of `n` simulated summary
//! statistics at one parameter value and returns the log of an estimated
//! density at the observed statistic.

mod batch;
mod gaussian;
mod grc;
mod kde;
mod semiparametric;
mod shrinkage;

pub use batch::StatisticBatch;
pub use gaussian::{fit_gaussian_sl, gaussian_sl_logdensity, GaussianSLParams, MIN_VARIANCE};
pub use grc::{gaussian_rank_correlation, midranks, CorrelationMatrix};
pub use kde::{silverman_bandwidth, type7_quantile, KdeMarginal, CDF_CLAMP};
pub use semiparametric::{semibsl_logdensity, semibsl_logdensity_shrunk, SemiparametricParts};
pub use shrinkage::{tune_shrinkage, warton_shrink, ShrinkageTuning, DEFAULT_TARGET_STD};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimatorError {
    #[error("invalid statistic batch: {0}")]
    InvalidBatch(String),
    #[error("observed statistic has length {found}, batch has {expected} columns")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("statistic column {column} has (near) zero variance")]
    DegenerateCovariance { column: usize },
    #[error("covariance matrix is not positive definite even after jitter")]
    SingularCovariance,
    #[error("correlation matrix is not positive definite even after jitter")]
    SingularCorrelation,
    #[error("samples have zero standard deviation and zero IQR")]
    ZeroDispersion,
    #[error("shrinkage must lie in [0, 1], got {0}")]
    InvalidShrinkage(f64),
    #[error("no shrinkage value in the grid reaches log-likelihood std <= {target}")]
    NoFeasibleLambda { target: f64 },
}

/// Which density estimator produced a log-likelihood.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum EstimatorTag {
    Gaussian,
    Semiparametric,
    SemiparametricShrunk,
}

impl EstimatorTag {
    pub fn as_str(self) -> &'static str {
        match self {
            EstimatorTag::Gaussian => "gaussian",
            EstimatorTag::Semiparametric => "semiparametric",
            EstimatorTag::SemiparametricShrunk => "semiparametric-shrunk",
        }
    }
}

/// Log of an estimated likelihood; `-inf` is a legitimate value, NaN and
/// `+inf` are not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogLikelihoodEstimate {
    pub logvalue: f64,
    pub estimator: EstimatorTag,
    pub n_used: usize,
}

impl LogLikelihoodEstimate {
    pub(crate) fn new(logvalue: f64, estimator: EstimatorTag, n_used: usize) -> Self {
        debug_assert!(!logvalue.is_nan() && logvalue != f64::INFINITY);
        let logvalue = if logvalue.is_nan() { f64::NEG_INFINITY } else { logvalue };
        LogLikelihoodEstimate { logvalue, estimator, n_used }
    }

    pub fn is_neg_infinite(&self) -> bool {
        self.logvalue == f64::NEG_INFINITY
    }
}

/// Estimator selection for the samplers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Estimator {
    Gaussian,
    Semiparametric,
    /// semiBSL with Warton shrinkage of the copula correlation.
    SemiparametricShrunk { lambda: f64 },
}

impl Estimator {
    pub fn tag(&self) -> EstimatorTag {
        match self {
            Estimator::Gaussian => EstimatorTag::Gaussian,
            Estimator::Semiparametric => EstimatorTag::Semiparametric,
            Estimator::SemiparametricShrunk { .. } => EstimatorTag::SemiparametricShrunk,
        }
    }

    pub fn log_likelihood(
        &self,
        batch: &StatisticBatch,
        observed: &[f64],
    ) -> Result<LogLikelihoodEstimate, EstimatorError> {
        match *self {
            Estimator::Gaussian => {
                let params = fit_gaussian_sl(batch)?;
                gaussian_sl_logdensity(&params, observed)
            }
            Estimator::Semiparametric => semibsl_logdensity(batch, observed),
            Estimator::SemiparametricShrunk { lambda } => {
                semibsl_logdensity_shrunk(batch, observed, lambda)
            }
        }
    }
}
