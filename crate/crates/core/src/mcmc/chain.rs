use nalgebra::DMatrix;

use super::ParameterTransform;

/// Output of a sampler run. Row `t` of `draws` is the state after
/// iteration `t + 1`; the starting point is kept separately.
#[derive(Debug, Clone, PartialEq)]
pub struct Chain {
    pub param_names: Vec<String>,
    pub draws: Vec<Vec<f64>>,
    pub loglikes: Vec<f64>,
    pub accepted: Vec<bool>,
    pub seed: u64,
    /// Estimator tag, or `"abc"`.
    pub method: String,
    /// Simulations per iteration.
    pub n_sim: usize,
    pub initial: Vec<f64>,
    pub initial_loglike: f64,
}

impl Chain {
    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.initial.len()
    }

    pub fn acceptance_rate(&self) -> f64 {
        if self.accepted.is_empty() {
            return 0.0;
        }
        self.accepted.iter().filter(|&&a| a).count() as f64 / self.accepted.len() as f64
    }

    pub fn component(&self, j: usize) -> Vec<f64> {
        self.draws.iter().map(|d| d[j]).collect()
    }

    /// Draws after discarding the first `burnin`.
    pub fn after_burnin(&self, burnin: usize) -> &[Vec<f64>] {
        &self.draws[burnin.min(self.draws.len())..]
    }

    /// Sample covariance of the post-burn-in draws in the unconstrained
    /// space, scaled by `2.38^2 / p`, for use as a random-walk proposal.
    pub fn pilot_covariance(&self, transform: &ParameterTransform, burnin: usize) -> Option<DMatrix<f64>> {
        let z: Vec<Vec<f64>> = self.after_burnin(burnin).iter().map(|d| transform.forward(d)).collect();
        let p = self.dim();
        if z.len() < 2 || p == 0 {
            return None;
        }
        let m = z.len() as f64;
        let mean: Vec<f64> = (0..p).map(|j| z.iter().map(|r| r[j]).sum::<f64>() / m).collect();
        let mut cov = DMatrix::from_fn(p, p, |a, b| {
            z.iter().map(|r| (r[a] - mean[a]) * (r[b] - mean[b])).sum::<f64>() / (m - 1.0)
        });
        cov *= 2.38f64.powi(2) / p as f64;
        Some(cov)
    }
}
