use rand::Rng;

use super::{Chain, McmcError, ParameterTransform, Prior, ProposalSpec};
use crate::estimators::Estimator;
use crate::models::{simulate_batch, SimulatorModel};
use crate::rng::{stream, substream};

/// Attempts at the initial value before giving up.
pub const DEFAULT_INIT_RETRIES: usize = 10;

/// Simulation counters for initialisation attempts live above this offset,
/// keeping them disjoint from iteration counters.
pub(crate) const INIT_COUNTER_BASE: u64 = 1 << 62;

#[derive(Debug, Clone, PartialEq)]
pub struct SlSettings {
    /// Simulations per iteration.
    pub n: usize,
    pub iterations: usize,
    pub theta0: Vec<f64>,
    pub seed: u64,
    pub init_retries: usize,
}

impl SlSettings {
    pub fn new(n: usize, iterations: usize, theta0: Vec<f64>, seed: u64) -> Self {
        SlSettings { n, iterations, theta0, seed, init_retries: DEFAULT_INIT_RETRIES }
    }
}

/// Random-walk Metropolis-Hastings in the unconstrained space of
/// `transform` on the target `exp(loglike) * prior`.
///
/// `loglike(theta, counter)` may be noisy; it is called once per proposal
/// that lies in the prior support, with `counter` equal to the iteration
/// (1-based), and the incumbent's value is carried forward unchanged.
/// Proposals and uniforms come from the chain substream of `seed`.
#[allow(clippy::too_many_arguments)]
pub fn run_metropolis<F>(
    mut loglike: F,
    prior: &dyn Prior,
    transform: &ParameterTransform,
    proposal: &ProposalSpec,
    iterations: usize,
    theta0: &[f64],
    seed: u64,
    init_retries: usize,
) -> Result<Chain, McmcError>
where
    F: FnMut(&[f64], u64) -> f64,
{
    let p = transform.dim();
    if theta0.len() != p {
        return Err(McmcError::DimensionMismatch { expected: p, found: theta0.len() });
    }
    if proposal.dim() != p {
        return Err(McmcError::DimensionMismatch { expected: p, found: proposal.dim() });
    }
    let mut lp = prior.log_density(theta0);
    if lp == f64::NEG_INFINITY {
        return Err(McmcError::InitialOutsideSupport(theta0.to_vec()));
    }
    let attempts = init_retries.max(1);
    let mut ll = f64::NEG_INFINITY;
    for k in 0..attempts {
        ll = loglike(theta0, INIT_COUNTER_BASE + k as u64);
        if ll.is_finite() {
            break;
        }
    }
    if !ll.is_finite() {
        return Err(McmcError::InitializationFailure { attempts });
    }
    let initial_loglike = ll;

    let mut rng = substream(seed, stream::CHAIN, 0, 0);
    let mut z = transform.forward(theta0);
    let mut theta = theta0.to_vec();
    let mut lj = transform.log_jacobian(&z);
    let mut draws = Vec::with_capacity(iterations);
    let mut loglikes = Vec::with_capacity(iterations);
    let mut accepted = Vec::with_capacity(iterations);

    for t in 1..=iterations {
        let z_new = proposal.step(&z, &mut rng);
        let log_u = rng.random::<f64>().ln();
        let theta_new = transform.inverse(&z_new);
        let lp_new = prior.log_density(&theta_new);
        let mut accept = false;
        if lp_new > f64::NEG_INFINITY && theta_new.iter().all(|v| v.is_finite()) {
            let ll_new = loglike(&theta_new, t as u64);
            if ll_new > f64::NEG_INFINITY && !ll_new.is_nan() {
                let lj_new = transform.log_jacobian(&z_new);
                let log_r = (ll_new + lp_new + lj_new) - (ll + lp + lj);
                if log_u < log_r {
                    accept = true;
                    z = z_new;
                    theta = theta_new;
                    ll = ll_new;
                    lp = lp_new;
                    lj = lj_new;
                }
            }
        }
        draws.push(theta.clone());
        loglikes.push(ll);
        accepted.push(accept);
    }

    Ok(Chain {
        param_names: (1..=p).map(|i| format!("theta{i}")).collect(),
        draws,
        loglikes,
        accepted,
        seed,
        method: String::new(),
        n_sim: 0,
        initial: theta0.to_vec(),
        initial_loglike,
    })
}

/// MCMC with a synthetic likelihood estimated from `n` fresh simulations
/// per proposal. Estimator or simulator failures count as `-inf`.
pub fn run_mcmc_sl<M: SimulatorModel + ?Sized>(
    model: &M,
    estimator: Estimator,
    observed: &[f64],
    proposal: &ProposalSpec,
    settings: &SlSettings,
) -> Result<Chain, McmcError> {
    if settings.n < 3 {
        return Err(McmcError::InvalidSetting(format!("n must be at least 3, got {}", settings.n)));
    }
    if observed.len() != model.stat_dim() {
        return Err(McmcError::DimensionMismatch { expected: model.stat_dim(), found: observed.len() });
    }
    let seed = settings.seed;
    let target = |theta: &[f64], counter: u64| match simulate_batch(model, theta, settings.n, seed, counter) {
        Ok(batch) => estimator.log_likelihood(&batch, observed).map_or(f64::NEG_INFINITY, |e| e.logvalue),
        Err(_) => f64::NEG_INFINITY,
    };
    let mut chain = run_metropolis(
        target,
        model.prior(),
        model.transform(),
        proposal,
        settings.iterations,
        &settings.theta0,
        seed,
        settings.init_retries,
    )?;
    chain.param_names = model.param_names().into_iter().map(String::from).collect();
    chain.method = estimator.tag().as_str().to_string();
    chain.n_sim = settings.n;
    Ok(chain)
}
