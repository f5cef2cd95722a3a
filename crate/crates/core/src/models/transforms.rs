//! Monotone transformations applied to summary statistics to inject
//! skewness, kurtosis or a sharp peak at zero.

use nalgebra::{DMatrix, DVector};
use rand::Rng;

use super::{ModelError, SimulatorModel};
use crate::estimators::EstimatorError;
use crate::linalg::cholesky_with_jitter;
use crate::mcmc::{ParameterTransform, Prior};
use crate::rng::SimRng;
use crate::special::HALF_LN_2PI;

/// Sinh-arcsinh map `x -> sinh((asinh(x) + epsilon) / delta)`.
///
/// `epsilon` controls skewness and `delta > 0` tail weight; `(0, 1)` is the
/// identity and `delta < 1` gives heavier than normal tails.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SinhArcsinhParams {
    pub epsilon: f64,
    pub delta: f64,
}

impl SinhArcsinhParams {
    pub fn new(epsilon: f64, delta: f64) -> Result<Self, ModelError> {
        if !(delta > 0.0) || !delta.is_finite() || !epsilon.is_finite() {
            return Err(ModelError::InvalidConfig(format!(
                "sinh-arcsinh needs finite epsilon and delta > 0, got ({epsilon}, {delta})"
            )));
        }
        Ok(SinhArcsinhParams { epsilon, delta })
    }

    pub const IDENTITY: SinhArcsinhParams = SinhArcsinhParams { epsilon: 0.0, delta: 1.0 };

    /// Per-component parameters with `epsilon ~ U(-2, 2)` and
    /// `delta = u^((-1)^v)`, `u ~ U(1, 2)`, `v ~ Bernoulli(1/2)`.
    pub fn random(d: usize, rng: &mut SimRng) -> Vec<SinhArcsinhParams> {
        (0..d)
            .map(|_| {
                let epsilon = rng.random_range(-2.0..2.0);
                let u: f64 = rng.random_range(1.0..2.0);
                let delta = if rng.random_bool(0.5) { 1.0 / u } else { u };
                SinhArcsinhParams { epsilon, delta }
            })
            .collect()
    }

    pub fn forward(&self, x: f64) -> f64 {
        ((x.asinh() + self.epsilon) / self.delta).sinh()
    }

    pub fn inverse(&self, y: f64) -> f64 {
        (self.delta * y.asinh() - self.epsilon).sinh()
    }

    /// `ln |d inverse / dy|`.
    pub fn inverse_log_jacobian(&self, y: f64) -> f64 {
        log_cosh(self.delta * y.asinh() - self.epsilon) + self.delta.ln() - 0.5 * y.mul_add(y, 1.0).ln()
    }

    /// `ln |d forward / dx|`.
    pub fn forward_log_jacobian(&self, x: f64) -> f64 {
        log_cosh((x.asinh() + self.epsilon) / self.delta) - self.delta.ln() - 0.5 * x.mul_add(x, 1.0).ln()
    }
}

fn log_cosh(x: f64) -> f64 {
    let a = x.abs();
    // ln cosh a = a + ln(1 + e^{-2a}) - ln 2
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// `sgn(s) |s|^p`.
pub fn power_transform(s: f64, p: f64) -> f64 {
    if s == 0.0 {
        0.0
    } else {
        s.signum() * s.abs().powf(p)
    }
}

/// Exact log-density of `y = f(x)` with `x ~ N(mu, sigma)` and `f` the
/// sinh-arcsinh map applied elementwise with common parameters.
pub fn transformed_gaussian_exact_loglike(
    y: &[f64],
    mu: &DVector<f64>,
    sigma: &DMatrix<f64>,
    epsilon: f64,
    delta: f64,
) -> Result<f64, EstimatorError> {
    let d = y.len();
    if mu.len() != d || sigma.nrows() != d {
        return Err(EstimatorError::DimensionMismatch { expected: mu.len(), found: d });
    }
    let params = SinhArcsinhParams { epsilon, delta };
    let chol = cholesky_with_jitter(sigma).ok_or(EstimatorError::SingularCovariance)?;
    let back = DVector::from_iterator(d, y.iter().map(|&v| params.inverse(v)));
    let resid = back - mu;
    let gauss = -(d as f64) * HALF_LN_2PI - 0.5 * chol.log_det() - 0.5 * chol.inv_quad_form(&resid);
    let jac: f64 = y.iter().map(|&v| params.inverse_log_jacobian(v)).sum();
    Ok(gauss + jac)
}

/// Transformation applied to every summary statistic.
#[derive(Debug, Clone, PartialEq)]
pub enum StatTransform {
    None,
    /// One parameter pair shared by all components, or one per component.
    SinhArcsinh(Vec<SinhArcsinhParams>),
    Power(f64),
}

impl StatTransform {
    pub fn apply(&self, stats: &mut [f64]) {
        match self {
            StatTransform::None => {}
            StatTransform::SinhArcsinh(params) => {
                for (i, s) in stats.iter_mut().enumerate() {
                    let p = if params.len() == 1 { params[0] } else { params[i] };
                    *s = p.forward(*s);
                }
            }
            StatTransform::Power(p) => {
                for s in stats.iter_mut() {
                    *s = power_transform(*s, *p);
                }
            }
        }
    }
}

/// A model whose summary statistics pass through a [`StatTransform`].
#[derive(Debug, Clone)]
pub struct Transformed<M> {
    pub inner: M,
    pub stat_transform: StatTransform,
}

impl<M: SimulatorModel> Transformed<M> {
    pub fn new(inner: M, stat_transform: StatTransform) -> Result<Self, ModelError> {
        if let StatTransform::SinhArcsinh(p) = &stat_transform {
            if p.len() != 1 && p.len() != inner.stat_dim() {
                return Err(ModelError::InvalidConfig(format!(
                    "{} sinh-arcsinh parameter pairs for {} statistics",
                    p.len(),
                    inner.stat_dim()
                )));
            }
        }
        Ok(Transformed { inner, stat_transform })
    }
}

impl<M: SimulatorModel> SimulatorModel for Transformed<M> {
    type Data = M::Data;

    fn name(&self) -> &'static str {
        self.inner.name()
    }
    fn param_names(&self) -> Vec<&'static str> {
        self.inner.param_names()
    }
    fn stat_dim(&self) -> usize {
        self.inner.stat_dim()
    }
    fn simulate(&self, theta: &[f64], rng: &mut SimRng) -> Result<Self::Data, ModelError> {
        self.inner.simulate(theta, rng)
    }
    fn summarize(&self, data: &Self::Data) -> Result<Vec<f64>, ModelError> {
        let mut s = self.inner.summarize(data)?;
        self.stat_transform.apply(&mut s);
        Ok(s)
    }
    fn prior(&self) -> &dyn Prior {
        self.inner.prior()
    }
    fn transform(&self) -> &ParameterTransform {
        self.inner.transform()
    }
    fn true_params(&self) -> Option<Vec<f64>> {
        self.inner.true_params()
    }
}
