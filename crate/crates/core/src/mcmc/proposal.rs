use nalgebra::{DMatrix, DVector};
use rand_distr::{Distribution, StandardNormal};

use super::McmcError;
use crate::rng::SimRng;

/// Gaussian random-walk proposal in the unconstrained space.
#[derive(Debug, Clone)]
pub struct ProposalSpec {
    covariance: DMatrix<f64>,
    lower: DMatrix<f64>,
}

impl ProposalSpec {
    pub fn new(covariance: DMatrix<f64>) -> Result<Self, McmcError> {
        if !covariance.is_square() || covariance.iter().any(|v| !v.is_finite()) {
            return Err(McmcError::InvalidProposal);
        }
        let sym = (&covariance + covariance.transpose()) * 0.5;
        let lower = sym.clone().cholesky().ok_or(McmcError::InvalidProposal)?.l();
        Ok(ProposalSpec { covariance: sym, lower })
    }

    pub fn diagonal(variances: &[f64]) -> Result<Self, McmcError> {
        Self::new(DMatrix::from_diagonal(&DVector::from_column_slice(variances)))
    }

    pub fn dim(&self) -> usize {
        self.covariance.nrows()
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.covariance
    }

    pub fn step(&self, z: &[f64], rng: &mut SimRng) -> Vec<f64> {
        let xi = DVector::from_fn(self.dim(), |_, _| StandardNormal.sample(rng));
        let delta = &self.lower * xi;
        z.iter().zip(delta.iter()).map(|(a, b)| a + b).collect()
    }
}
