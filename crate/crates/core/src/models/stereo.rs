//! Stereological extremes: ellipsoidal inclusions observed through planar
//! cross-sections.
//!
//! Construction of one synthetic sample at `(lambda, sigma, xi)`:
//!
//! 1. the number of inclusions cut by the plane is `Poisson(lambda)`;
//! 2. each inclusion has largest diameter `V3 = NU0 + GPD(sigma, xi)` and
//!    further principal diameters `U1 V3`, `U2 V3` with `U1, U2 ~ U(0, 1)`;
//! 3. the plane is normal to one of the three principal axes, chosen
//!    uniformly, and cuts at a uniform relative distance `u` from the centre,
//!    which scales the two in-plane diameters by `sqrt(1 - u^2)` (the
//!    spherical section rule applied to an ellipsoid);
//! 4. the observed size `S` is the larger in-plane diameter, and only
//!    sections with `S > NU0` are recorded.
//!
//! Summaries are the number of recorded sections and the logs of their
//! minimum, mean and maximum.

use rand::Rng;
use rand_distr::{Distribution, Poisson};

use super::{ModelError, SimulatorModel};
use crate::mcmc::{BoxPrior, ParameterTransform, Prior};
use crate::rng::SimRng;

/// Size threshold for recorded inclusions.
pub const NU0: f64 = 5.0;

/// Draws `NU0`-free generalized Pareto excess `X` with
/// `P(X <= x) = 1 - (1 + xi x / sigma)_+^(-1/xi)` by inversion.
pub fn gpd_sample(sigma: f64, xi: f64, rng: &mut SimRng) -> f64 {
    let u: f64 = rng.random();
    gpd_quantile(sigma, xi, u)
}

pub(crate) fn gpd_quantile(sigma: f64, xi: f64, u: f64) -> f64 {
    if xi.abs() < 1e-12 {
        -sigma * (-u).ln_1p()
    } else {
        sigma / xi * ((-xi * (-u).ln_1p()).exp_m1())
    }
}

fn check(theta: &[f64]) -> Result<(), ModelError> {
    if theta.len() == 3 && theta[0] > 0.0 && theta[1] > 0.0 && theta[2].is_finite() {
        Ok(())
    } else {
        Err(ModelError::OutOfSupport { model: "stereo", theta: theta.to_vec() })
    }
}

/// Recorded cross-section sizes (possibly empty).
pub fn stereo_simulate(theta: &[f64], rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
    check(theta)?;
    let (lambda, sigma, xi) = (theta[0], theta[1], theta[2]);
    let count = Poisson::new(lambda).expect("positive intensity").sample(rng) as usize;
    let mut sizes = Vec::with_capacity(count);
    for _ in 0..count {
        let v3 = NU0 + gpd_sample(sigma, xi, rng);
        let u1: f64 = rng.random();
        let u2: f64 = rng.random();
        let diameters = [u1 * v3, u2 * v3, v3];
        let normal_axis = rng.random_range(0..3usize);
        let offset: f64 = rng.random();
        let scale = (1.0 - offset * offset).sqrt();
        let in_plane = diameters
            .iter()
            .enumerate()
            .filter(|&(k, _)| k != normal_axis)
            .map(|(_, &v)| v)
            .fold(0.0, f64::max);
        let s = scale * in_plane;
        if s > NU0 {
            sizes.push(s);
        }
    }
    Ok(sizes)
}

/// `[count, ln min S, ln mean S, ln max S]`.
pub fn stereo_summaries(sizes: &[f64]) -> Result<Vec<f64>, ModelError> {
    if sizes.is_empty() {
        return Err(ModelError::DegenerateSample);
    }
    let min = sizes.iter().copied().fold(f64::INFINITY, f64::min);
    let max = sizes.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mean = sizes.iter().sum::<f64>() / sizes.len() as f64;
    Ok(vec![sizes.len() as f64, min.ln(), mean.ln(), max.ln()])
}

#[derive(Debug, Clone)]
pub struct Stereo {
    prior: BoxPrior,
    transform: ParameterTransform,
}

impl Stereo {
    /// Generating values of the shipped synthetic dataset.
    pub const TRUE_PARAMS: [f64; 3] = [100.0, 2.0, 0.1];
    pub const BOUNDS: [(f64, f64); 3] = [(30.0, 200.0), (0.0, 15.0), (-3.0, 3.0)];
}

impl Default for Stereo {
    fn default() -> Self {
        Stereo {
            prior: BoxPrior::new(Self::BOUNDS.to_vec()),
            transform: ParameterTransform::logit_box(&Self::BOUNDS),
        }
    }
}

impl SimulatorModel for Stereo {
    type Data = Vec<f64>;

    fn name(&self) -> &'static str {
        "stereo"
    }
    fn param_names(&self) -> Vec<&'static str> {
        vec!["lambda", "sigma", "xi"]
    }
    fn stat_dim(&self) -> usize {
        4
    }
    fn simulate(&self, theta: &[f64], rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
        stereo_simulate(theta, rng)
    }
    fn summarize(&self, data: &Vec<f64>) -> Result<Vec<f64>, ModelError> {
        stereo_summaries(data)
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

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::substream;

    #[test]
    fn exponential_limit() {
        let mut rng = substream(1, 0, 0, 0);
        let m = 100_000;
        let mean = (0..m).map(|_| gpd_sample(1.5, 1e-8, &mut rng)).sum::<f64>() / m as f64;
        assert!((mean - 1.5).abs() < 0.03, "{mean}");
    }

    #[test]
    fn negative_shape_is_bounded() {
        let mut rng = substream(2, 0, 0, 0);
        let (sigma, xi) = (2.0, -0.5);
        let bound = -sigma / xi;
        for _ in 0..1_000_000 {
            assert!(gpd_sample(sigma, xi, &mut rng) <= bound);
        }
    }

    #[test]
    fn sampler_matches_inverse_cdf() {
        let (sigma, xi) = (1.5, 0.1);
        let mut rng = substream(3, 0, 0, 0);
        let n = 100_000;
        let mut xs: Vec<f64> = (0..n).map(|_| gpd_sample(sigma, xi, &mut rng)).collect();
        xs.sort_unstable_by(f64::total_cmp);
        let cdf = |x: f64| 1.0 - (1.0 + xi * x / sigma).powf(-1.0 / xi);
        let ks = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let f = cdf(x);
                (f - i as f64 / n as f64).abs().max(((i + 1) as f64 / n as f64 - f).abs())
            })
            .fold(0.0, f64::max);
        assert!(ks < 0.01, "KS = {ks}");
    }

    #[test]
    fn summaries_and_degenerate_sample() {
        let s = stereo_summaries(&[6.0, 8.0, 10.0]).unwrap();
        assert_eq!(s[0], 3.0);
        assert!((s[1] - 6f64.ln()).abs() < 1e-15);
        assert!((s[2] - 8f64.ln()).abs() < 1e-15);
        assert!((s[3] - 10f64.ln()).abs() < 1e-15);
        assert_eq!(stereo_summaries(&[]), Err(ModelError::DegenerateSample));
    }

    #[test]
    fn recorded_sections_exceed_threshold() {
        let mut rng = substream(4, 0, 0, 0);
        let s = stereo_simulate(&Stereo::TRUE_PARAMS, &mut rng).unwrap();
        assert!(!s.is_empty());
        assert!(s.iter().all(|&v| v > NU0));
    }
}
