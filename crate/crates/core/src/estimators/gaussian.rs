use nalgebra::{DMatrix, DVector};

use super::{EstimatorError, EstimatorTag, LogLikelihoodEstimate, StatisticBatch};
use crate::linalg::cholesky_with_jitter;
use crate::special::HALF_LN_2PI;

/// Columns with sample variance below this are treated as constant.
pub const MIN_VARIANCE: f64 = 1e-300;

/// Sample mean and unbiased (`n - 1`) covariance of a statistic batch.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianSLParams {
    pub mean: DVector<f64>,
    pub covariance: DMatrix<f64>,
}

pub fn fit_gaussian_sl(batch: &StatisticBatch) -> Result<GaussianSLParams, EstimatorError> {
    let n = batch.n();
    let x = batch.values();
    let mean = x.row_mean().transpose();
    let mut centered = x.clone();
    for (j, mut col) in centered.column_iter_mut().enumerate() {
        col.add_scalar_mut(-mean[j]);
    }
    let mut covariance = centered.tr_mul(&centered) / (n as f64 - 1.0);
    // gemm leaves tiny asymmetries; mirror the lower triangle
    let d = covariance.nrows();
    for j in 0..d {
        if !(covariance[(j, j)] >= MIN_VARIANCE) {
            return Err(EstimatorError::DegenerateCovariance { column: j });
        }
        for i in (j + 1)..d {
            covariance[(j, i)] = covariance[(i, j)];
        }
    }
    Ok(GaussianSLParams { mean, covariance })
}

/// `log N(observed | mean, covariance)` through a (jittered) Cholesky factor.
pub fn gaussian_sl_logdensity(
    params: &GaussianSLParams,
    observed: &[f64],
) -> Result<LogLikelihoodEstimate, EstimatorError> {
    let d = params.mean.len();
    if observed.len() != d {
        return Err(EstimatorError::DimensionMismatch { expected: d, found: observed.len() });
    }
    let chol = cholesky_with_jitter(&params.covariance).ok_or(EstimatorError::SingularCovariance)?;
    let resid = DVector::from_column_slice(observed) - &params.mean;
    let quad = chol.inv_quad_form(&resid);
    let value = -(d as f64) * HALF_LN_2PI - 0.5 * chol.log_det() - 0.5 * quad;
    let value = if value.is_finite() { value } else { f64::NEG_INFINITY };
    Ok(LogLikelihoodEstimate::new(value, EstimatorTag::Gaussian, 0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;
    use rand::Rng;
    use rand_distr::StandardNormal;

    fn params(mean: Vec<f64>, cov: &[f64]) -> GaussianSLParams {
        let d = mean.len();
        GaussianSLParams {
            mean: DVector::from_vec(mean),
            covariance: DMatrix::from_row_slice(d, d, cov),
        }
    }

    #[test]
    fn exact_moments_on_tiny_batch() {
        let b = StatisticBatch::from_rows(&[vec![0.0, 0.0], vec![1.0, 1.0], vec![2.0, 2.0]]).unwrap();
        let p = fit_gaussian_sl(&b).unwrap();
        assert_eq!(p.mean.as_slice(), &[1.0, 1.0]);
        assert_eq!(p.covariance.as_slice(), &[1.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn constant_column_is_degenerate() {
        let b = StatisticBatch::from_rows(&[vec![0.0, 5.0], vec![1.0, 5.0], vec![2.0, 5.0]]).unwrap();
        assert_eq!(fit_gaussian_sl(&b), Err(EstimatorError::DegenerateCovariance { column: 1 }));
    }

    #[test]
    fn covariance_converges_to_truth() {
        let d = 3;
        let sigma = DMatrix::from_fn(d, d, |i, j| 0.5f64.powi((i as i32 - j as i32).abs()));
        let l = sigma.clone().cholesky().unwrap().l();
        let mut rng = substream(11, 0, 0, 0);
        let n = 100_000;
        let values = DMatrix::from_fn(n, d, |_, _| rng.sample::<f64, _>(StandardNormal));
        let values = values * l.transpose();
        let p = fit_gaussian_sl(&StatisticBatch::new(values).unwrap()).unwrap();
        for (a, b) in p.covariance.iter().zip(sigma.iter()) {
            assert!((a - b).abs() < 0.02, "{a} vs {b}");
        }
    }

    #[test]
    fn closed_form_values() {
        let v = gaussian_sl_logdensity(&params(vec![0.0], &[1.0]), &[0.0]).unwrap();
        assert!((v.logvalue + 0.5 * (2.0 * std::f64::consts::PI).ln()).abs() < 1e-15);
        let v = gaussian_sl_logdensity(&params(vec![0.0, 0.0], &[1.0, 0.0, 0.0, 1.0]), &[3.0, 4.0]).unwrap();
        assert!((v.logvalue - (-(2.0 * std::f64::consts::PI).ln() - 12.5)).abs() < 1e-13);
        assert_eq!(v.estimator, EstimatorTag::Gaussian);
    }

    /// Independent route: explicit inverse and LU determinant.
    fn lu_logdensity(mean: &DVector<f64>, cov: &DMatrix<f64>, x: &DVector<f64>) -> f64 {
        let d = mean.len() as f64;
        let inv = cov.clone().try_inverse().unwrap();
        let r = x - mean;
        let q = (r.transpose() * inv * &r)[(0, 0)];
        -0.5 * d * (2.0 * std::f64::consts::PI).ln() - 0.5 * cov.determinant().ln() - 0.5 * q
    }

    #[test]
    fn matches_lu_route_and_slice_quadrature() {
        let mut rng = substream(5, 0, 0, 0);
        let d = 5;
        let a = DMatrix::from_fn(d, d, |_, _| rng.random_range(-1.0..1.0));
        let cov = &a * a.transpose() + DMatrix::identity(d, d) * 0.5;
        let mean = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let x = DVector::from_fn(d, |_, _| rng.random_range(-1.0..1.0));
        let p = GaussianSLParams { mean: mean.clone(), covariance: cov.clone() };
        let got = gaussian_sl_logdensity(&p, x.as_slice()).unwrap().logvalue;
        assert!((got - lu_logdensity(&mean, &cov, &x)).abs() < 1e-10);

        // integrate out coordinate 0 on a slice; compare with the analytic marginal
        let sd0 = cov[(0, 0)].sqrt();
        let (lo, hi, m) = (mean[0] - 12.0 * sd0, mean[0] + 12.0 * sd0, 20_000);
        let step = (hi - lo) / m as f64;
        let mut total = 0.0;
        for k in 0..=m {
            let mut xs = x.clone();
            xs[0] = lo + k as f64 * step;
            let w = if k == 0 || k == m { 0.5 } else { 1.0 };
            total += w * gaussian_sl_logdensity(&p, xs.as_slice()).unwrap().logvalue.exp();
        }
        total *= step;
        let sub = |v: &DVector<f64>| DVector::from_iterator(d - 1, v.iter().skip(1).copied());
        let cov_sub = cov.view((1, 1), (d - 1, d - 1)).into_owned();
        let marginal = lu_logdensity(&sub(&mean), &cov_sub, &sub(&x)).exp();
        assert!(((total - marginal) / marginal).abs() < 1e-8, "{total} vs {marginal}");
    }

    #[test]
    fn far_observation_is_finite_or_neg_inf_never_nan() {
        let p = params(vec![0.0], &[1.0]);
        let v = gaussian_sl_logdensity(&p, &[1e200]).unwrap();
        assert!(!v.logvalue.is_nan());
    }
}
