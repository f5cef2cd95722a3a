//! Random-walk Metropolis-Hastings samplers for synthetic likelihood and ABC.

mod abc;
mod chain;
mod ess;
mod prior;
mod proposal;
mod sampler;
mod transform;

pub use abc::{mahalanobis_covariance, run_mcmc_abc, AbcSettings};
pub use chain::Chain;
pub use ess::effective_sample_size;
pub(crate) use ess::ess_of_series;
pub use prior::{BoxPrior, Ma2TrianglePrior, Mg1Prior, Prior};
pub use proposal::ProposalSpec;
pub use sampler::{run_metropolis, run_mcmc_sl, SlSettings, DEFAULT_INIT_RETRIES};
pub use transform::{Bijector, ParameterTransform};

use thiserror::Error;

use crate::models::ModelError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum McmcError {
    #[error("log-likelihood at the initial value was -inf after {attempts} attempts")]
    InitializationFailure { attempts: usize },
    #[error("initial value {0:?} is outside the prior support")]
    InitialOutsideSupport(Vec<f64>),
    #[error("proposal covariance is not positive definite")]
    InvalidProposal,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid sampler setting: {0}")]
    InvalidSetting(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}
