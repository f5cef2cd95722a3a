//! The semi-parametric likelihood: KDE marginals joined by a Gaussian copula
//! whose correlation is the Gaussian rank correlation of the batch.

use nalgebra::DVector;

use super::grc::{rank_scores_from_ranks, ranks_from_order};
use super::shrinkage::warton_shrink;
use super::{CorrelationMatrix, EstimatorError, EstimatorTag, KdeMarginal, LogLikelihoodEstimate, StatisticBatch};
use crate::linalg::cholesky_with_jitter;
use crate::special::norm_ppf;

/// Intermediate quantities of one semi-parametric evaluation.
#[derive(Debug, Clone)]
pub struct SemiparametricParts {
    /// `log f_j(s_j)` for each statistic.
    pub log_marginals: Vec<f64>,
    /// `Phi^{-1}` of the clamped KDE CDF at each observed statistic.
    pub eta: Vec<f64>,
    pub bandwidths: Vec<f64>,
    pub correlation: CorrelationMatrix,
    /// `-0.5 log|R| - 0.5 eta^T (R^{-1} - I) eta`
    pub copula_log: f64,
    /// Jittered Cholesky retries needed for `R`.
    pub jitter_retries: usize,
}

impl SemiparametricParts {
    pub fn log_density(&self) -> f64 {
        let marg: f64 = self.log_marginals.iter().sum();
        if marg == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            marg + self.copula_log
        }
    }

    /// Fits every piece; `lambda` applies Warton shrinkage to the correlation.
    pub fn compute(
        batch: &StatisticBatch,
        observed: &[f64],
        lambda: Option<f64>,
    ) -> Result<Self, EstimatorError> {
        batch.check_observed(observed)?;
        let n = batch.n();
        let d = batch.d();
        let mut log_marginals = Vec::with_capacity(d);
        let mut eta = Vec::with_capacity(d);
        let mut bandwidths = Vec::with_capacity(d);
        let mut ranks = Vec::with_capacity(d);
        let mut order: Vec<usize> = Vec::with_capacity(n);
        for (j, &obs) in observed.iter().enumerate() {
            let col = batch.column(j);
            order.clear();
            order.extend(0..n);
            order.sort_unstable_by(|&a, &b| col[a].total_cmp(&col[b]));
            let sorted: Vec<f64> = order.iter().map(|&i| col[i]).collect();
            ranks.push(ranks_from_order(col, &order));
            let kde = KdeMarginal::fit_sorted(sorted)?;
            let (pdf, cdf) = kde.pdf_cdf(obs);
            log_marginals.push(pdf.ln());
            eta.push(norm_ppf(cdf.clamp(super::CDF_CLAMP, 1.0 - super::CDF_CLAMP)));
            bandwidths.push(kde.bandwidth());
        }
        let mut correlation = rank_scores_from_ranks(&ranks, n).correlation();
        if let Some(lambda) = lambda {
            correlation = warton_shrink(&correlation, lambda)?;
        }
        let chol = cholesky_with_jitter(correlation.matrix()).ok_or(EstimatorError::SingularCorrelation)?;
        let eta_vec = DVector::from_column_slice(&eta);
        let quad = chol.inv_quad_form(&eta_vec) - eta_vec.norm_squared();
        let copula_log = -0.5 * chol.log_det() - 0.5 * quad;
        Ok(SemiparametricParts {
            log_marginals,
            eta,
            bandwidths,
            correlation,
            copula_log,
            jitter_retries: chol.retries,
        })
    }
}

/// semiBSL log-likelihood of `observed` given the simulated batch.
pub fn semibsl_logdensity(
    batch: &StatisticBatch,
    observed: &[f64],
) -> Result<LogLikelihoodEstimate, EstimatorError> {
    let parts = SemiparametricParts::compute(batch, observed, None)?;
    Ok(LogLikelihoodEstimate::new(parts.log_density(), EstimatorTag::Semiparametric, batch.n()))
}

/// semiBSL with the copula correlation shrunk towards the identity.
pub fn semibsl_logdensity_shrunk(
    batch: &StatisticBatch,
    observed: &[f64],
    lambda: f64,
) -> Result<LogLikelihoodEstimate, EstimatorError> {
    let parts = SemiparametricParts::compute(batch, observed, Some(lambda))?;
    Ok(LogLikelihoodEstimate::new(
        parts.log_density(),
        EstimatorTag::SemiparametricShrunk,
        batch.n(),
    ))
}
