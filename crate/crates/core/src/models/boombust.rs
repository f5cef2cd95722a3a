//! Simple recruitment, boom and bust population model.
//!
//! `N_{t+1} ~ Poisson(N_t (1 + r)) + e_t` while `N_t <= kappa`, otherwise
//! `Binomial(N_t, alpha) + e_t`, with `e_t ~ Poisson(beta)`.

use rand_distr::{Binomial, Distribution, Poisson};

use super::moments::four_moments;
use super::{ModelError, SimulatorModel};
use crate::mcmc::{BoxPrior, ParameterTransform, Prior};
use crate::rng::SimRng;

fn poisson(mean: f64, rng: &mut SimRng) -> u64 {
    if mean <= 0.0 {
        0
    } else {
        Poisson::new(mean).expect("finite positive mean").sample(rng) as u64
    }
}

/// Population path of length `len` after discarding `burnin` steps. The
/// initial population is `round(kappa)`.
pub fn boombust_simulate(theta: &[f64], len: usize, burnin: usize, rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
    let valid = theta.len() == 4
        && theta[0] >= 0.0
        && theta[1] > 0.0
        && (0.0..=1.0).contains(&theta[2])
        && theta[3] >= 0.0
        && theta.iter().all(|v| v.is_finite());
    if !valid {
        return Err(ModelError::OutOfSupport { model: "boombust", theta: theta.to_vec() });
    }
    let (r, kappa, alpha, beta) = (theta[0], theta[1], theta[2], theta[3]);
    let mut n = kappa.round() as u64;
    let mut path = Vec::with_capacity(len);
    for t in 0..(burnin + len) {
        let base = if n as f64 <= kappa {
            poisson(n as f64 * (1.0 + r), rng)
        } else {
            Binomial::new(n, alpha).expect("probability in [0, 1]").sample(rng)
        };
        n = base + poisson(beta, rng);
        if t >= burnin {
            path.push(n as f64);
        }
    }
    Ok(path)
}

/// Mean, variance, skewness and kurtosis of the path, its differences and
/// its ratios (12 values). A ratio with zero denominator uses
/// `(x_i + 1) / (x_{i-1} + 1)`.
pub fn boombust_summaries(x: &[f64]) -> Vec<f64> {
    let diffs: Vec<f64> = x.windows(2).map(|w| w[1] - w[0]).collect();
    let ratios: Vec<f64> = x
        .windows(2)
        .map(|w| if w[0] == 0.0 { (w[1] + 1.0) / (w[0] + 1.0) } else { w[1] / w[0] })
        .collect();
    let mut out = Vec::with_capacity(12);
    out.extend(four_moments(x));
    out.extend(four_moments(&diffs));
    out.extend(four_moments(&ratios));
    out
}

#[derive(Debug, Clone)]
pub struct BoomBust {
    pub len: usize,
    pub burnin: usize,
    prior: BoxPrior,
    transform: ParameterTransform,
}

impl BoomBust {
    pub const TRUE_PARAMS: [f64; 4] = [0.4, 50.0, 0.09, 0.05];
    /// Parameter at which the Mahalanobis covariance for ABC is estimated.
    pub const ABC_COVARIANCE_PARAMS: [f64; 4] = [0.4, 50.0, 0.09, 0.1];
    pub const BOUNDS: [(f64, f64); 4] = [(0.0, 1.0), (10.0, 80.0), (0.0, 1.0), (0.0, 1.0)];
}

impl Default for BoomBust {
    fn default() -> Self {
        BoomBust {
            len: 250,
            burnin: 50,
            prior: BoxPrior::new(Self::BOUNDS.to_vec()),
            transform: ParameterTransform::logit_box(&Self::BOUNDS),
        }
    }
}

impl SimulatorModel for BoomBust {
    type Data = Vec<f64>;

    fn name(&self) -> &'static str {
        "boombust"
    }
    fn param_names(&self) -> Vec<&'static str> {
        vec!["r", "kappa", "alpha", "beta"]
    }
    fn stat_dim(&self) -> usize {
        12
    }
    fn simulate(&self, theta: &[f64], rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
        boombust_simulate(theta, self.len, self.burnin, rng)
    }
    fn summarize(&self, data: &Vec<f64>) -> Result<Vec<f64>, ModelError> {
        Ok(boombust_summaries(data))
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
    fn frozen_dynamics() {
        // round(20.6) = 21 > kappa, and Binomial(21, 1) + Poisson(0) = 21 forever
        let theta = [0.0, 20.6, 1.0, 0.0];
        let x = boombust_simulate(&theta, 250, 50, &mut substream(1, 0, 0, 0)).unwrap();
        assert!(x.iter().all(|&v| v == 21.0));
        let s = boombust_summaries(&x);
        assert_eq!(s[1], 0.0);
        assert_eq!(s[5], 0.0);
        assert_eq!(s[8], 1.0);
        assert_eq!(s[9], 0.0);
        assert!(s.iter().all(|v| v.is_finite()));
    }

    #[test]
    fn oscillates_around_kappa() {
        let theta = BoomBust::TRUE_PARAMS;
        let mut ok = 0;
        for rep in 0..100 {
            let x = boombust_simulate(&theta, 250, 50, &mut substream(2, 0, rep, 0)).unwrap();
            let crossings = x.windows(2).filter(|w| (w[0] <= 50.0) != (w[1] <= 50.0)).count();
            if crossings >= 2 {
                ok += 1;
            }
        }
        assert!(ok > 90, "{ok} of 100 replicates crossed kappa twice");
    }

    #[test]
    fn zero_denominator_ratio_guard() {
        let s = boombust_summaries(&[0.0, 2.0, 2.0, 0.0, 0.0]);
        // ratios: 3, 1, 0, 1
        assert!((s[8] - 1.25).abs() < 1e-15);
        assert!(s.iter().all(|v| v.is_finite()));
    }
}
