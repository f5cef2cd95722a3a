//! Posterior accuracy and estimator quality measurements.

mod exact;
mod grid;
mod study;

pub use exact::exact_ma2_posterior_grid;
pub use grid::{
    chain_bandwidth, chain_marginal, chain_to_grid, draws_to_grid, draws_to_grid_with_bandwidths, marginal_kde,
    marginal_kde_with_bandwidth, marginal_total_variation, total_variation, Axis, GridDensity, MarginalDensity,
};
pub use study::{estimator_bias_std_study, BiasStdRow, BiasStudy, StudyConfig, StudyReplicate};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DiagnosticsError {
    #[error("chain has no draws to estimate a density from")]
    EmptyChain,
    #[error("densities are defined on different grids")]
    GridMismatch,
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("density has no mass on the grid")]
    NoMass,
    #[error("invalid study configuration: {0}")]
    InvalidStudy(String),
}
