//! Benchmark simulators and their summary statistics.

mod boombust;
mod ma2;
mod mg1;
pub mod moments;
mod stereo;
mod toads;
mod transforms;

pub use boombust::{boombust_simulate, boombust_summaries, BoomBust};
pub use ma2::{ma2_covariance_bands, ma2_exact_loglike, ma2_in_support, ma2_simulate, Ma2};
pub use mg1::{mg1_simulate, Mg1};
pub use stereo::{gpd_sample, stereo_simulate, stereo_summaries, Stereo, NU0};
pub use toads::{
    stable_sample, toads_displacements, toads_simulate, Gmm, Toads, ToadsAuxiliary, ToadsData, TOAD_LAGS,
};
pub use transforms::{power_transform, transformed_gaussian_exact_loglike, SinhArcsinhParams, StatTransform, Transformed};

use thiserror::Error;

use crate::estimators::StatisticBatch;
use crate::mcmc::{ParameterTransform, Prior};
use crate::par::map_indices;
use crate::rng::{stream, substream, SimRng};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("parameter {theta:?} is outside the support of {model}")]
    OutOfSupport { model: &'static str, theta: Vec<f64> },
    #[error("simulated dataset has no observable inclusions")]
    DegenerateSample,
    #[error("Gaussian mixture fit failed: {0}")]
    GmmFitFailure(String),
    #[error("invalid simulated batch: {0}")]
    InvalidBatch(String),
    #[error("invalid model configuration: {0}")]
    InvalidConfig(String),
}

/// A stochastic simulator together with its summary statistic, prior and
/// sampling-space transform.
///
/// `simulate` must be a pure function of the parameters and the generator.
pub trait SimulatorModel: Sync {
    type Data;

    fn name(&self) -> &'static str;
    fn param_names(&self) -> Vec<&'static str>;
    /// Length `d` of the summary statistic.
    fn stat_dim(&self) -> usize;
    fn simulate(&self, theta: &[f64], rng: &mut SimRng) -> Result<Self::Data, ModelError>;
    fn summarize(&self, data: &Self::Data) -> Result<Vec<f64>, ModelError>;
    fn prior(&self) -> &dyn Prior;
    fn transform(&self) -> &ParameterTransform;
    fn true_params(&self) -> Option<Vec<f64>> {
        None
    }

    fn simulate_stats(&self, theta: &[f64], rng: &mut SimRng) -> Result<Vec<f64>, ModelError> {
        let data = self.simulate(theta, rng)?;
        self.summarize(&data)
    }
}

/// Simulates `n` statistics at `theta`; simulation `i` of `iteration` uses
/// the substream `(seed, SIMULATION, iteration, i)`.
pub fn simulate_batch<M: SimulatorModel + ?Sized>(
    model: &M,
    theta: &[f64],
    n: usize,
    seed: u64,
    iteration: u64,
) -> Result<StatisticBatch, ModelError> {
    let rows = map_indices(n, |i| {
        let mut rng = substream(seed, stream::SIMULATION, iteration, i as u64);
        model.simulate_stats(theta, &mut rng)
    });
    let rows: Vec<Vec<f64>> = rows.into_iter().collect::<Result<_, _>>()?;
    StatisticBatch::from_rows(&rows).map_err(|e| ModelError::InvalidBatch(e.to_string()))
}

/// Synthetic observed dataset at `theta` drawn from the dataset substream.
pub fn observed_dataset<M: SimulatorModel + ?Sized>(
    model: &M,
    theta: &[f64],
    seed: u64,
) -> Result<M::Data, ModelError> {
    let mut rng = substream(seed, stream::DATASET, 0, 0);
    model.simulate(theta, &mut rng)
}
