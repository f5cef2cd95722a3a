//! `run` and `pilot`: one MCMC chain from a configuration.

use std::path::{Path, PathBuf};
use std::time::Instant;

use nalgebra::DMatrix;
use semibsl::estimators::{tune_shrinkage, Estimator, ShrinkageTuning};
use semibsl::mcmc::{
    effective_sample_size, mahalanobis_covariance, run_mcmc_abc, run_mcmc_sl, AbcSettings, Chain, McmcError,
    ProposalSpec, SlSettings,
};
use semibsl::models::{simulate_batch, SimulatorModel};
use serde_json::json;

use crate::config::{EstimatorKind, LoadedConfig, SamplerKind};
use crate::dispatch::ModelTask;
use crate::io::{read_matrix, write_chain, write_json, write_manifest, write_matrix};
use crate::CliError;

/// Default lambda grid for shrinkage tuning: 0, 0.05, ..., 1.
pub fn lambda_grid() -> Vec<f64> {
    (0..=20).map(|k| k as f64 / 20.0).collect()
}

/// Counter for the Mahalanobis-covariance simulations, disjoint from
/// iteration and initialisation counters.
const MAHALANOBIS_COUNTER: u64 = u64::MAX;

pub struct ChainRun<'a> {
    pub cfg: &'a LoadedConfig,
    pub seed: u64,
    /// Overrides `estimator.n`.
    pub n: Option<usize>,
}

pub struct ChainResult {
    pub chain: Chain,
    pub lambda: Option<f64>,
    pub tuning: Option<ShrinkageTuning>,
    pub pilot_covariance: Option<DMatrix<f64>>,
    pub param_names: Vec<String>,
}

fn proposal_matrix(cfg: &LoadedConfig) -> Result<DMatrix<f64>, CliError> {
    let prop = cfg.config.proposal.get_ref();
    if let Some(c) = &prop.covariance {
        let rows = c.get_ref();
        let p = rows.len();
        return Ok(DMatrix::from_fn(p, p, |i, j| rows[i][j]));
    }
    if let Some(d) = &prop.diagonal {
        return Ok(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(d.get_ref())));
    }
    let f = prop.file.as_ref().expect("validated");
    read_matrix(&cfg.resolve(f.get_ref())).map_err(|e| cfg.proposal_error(format!("proposal.file: {e:#}")).into())
}

impl ModelTask for ChainRun<'_> {
    type Output = ChainResult;

    fn run<M: SimulatorModel>(self, model: &M, observed: Vec<f64>) -> Result<ChainResult, CliError> {
        let cfg = self.cfg;
        let c = &cfg.config;
        let p = model.param_names().len();
        cfg.check_dimension(p)?;
        let cov = proposal_matrix(cfg)?;
        if cov.nrows() != p || cov.ncols() != p {
            return Err(cfg.proposal_error(format!("proposal covariance is {}x{}, expected {p}x{p}", cov.nrows(), cov.ncols())).into());
        }
        let proposal =
            ProposalSpec::new(cov.clone()).map_err(|_| cfg.proposal_error("proposal covariance is not positive definite"))?;
        let theta0 = c.sampler.theta0.get_ref().clone();
        if model.prior().log_density(&theta0) == f64::NEG_INFINITY {
            return Err(cfg.theta0_error(format!("sampler.theta0 {theta0:?} is outside the prior support")).into());
        }
        let iterations = cfg.iterations();
        let init_retries = c.sampler.init_retries;
        let (chain, lambda, tuning) = match c.sampler.kind {
            SamplerKind::Sl => {
                let est_cfg = c.estimator.as_ref().expect("validated");
                let n = self.n.unwrap_or_else(|| cfg.n());
                let (estimator, lambda, tuning) = match est_cfg.kind {
                    EstimatorKind::Gaussian => (Estimator::Gaussian, None, None),
                    EstimatorKind::Semiparametric => (Estimator::Semiparametric, None, None),
                    EstimatorKind::SemiparametricShrunk => match (&est_cfg.lambda, &est_cfg.target_std) {
                        (Some(l), _) => (Estimator::SemiparametricShrunk { lambda: *l.get_ref() }, Some(*l.get_ref()), None),
                        (None, Some(target)) => {
                            let t = tune_shrinkage(
                                model,
                                &theta0,
                                &observed,
                                n,
                                *target.get_ref(),
                                &lambda_grid(),
                                est_cfg.tune_replicates,
                                self.seed,
                            )
                            .map_err(|e| CliError::Other(anyhow::anyhow!("shrinkage tuning: {e}")))?;
                            (Estimator::SemiparametricShrunk { lambda: t.lambda }, Some(t.lambda), Some(t))
                        }
                        (None, None) => unreachable!("validated"),
                    },
                };
                let settings = SlSettings { n, iterations, theta0: theta0.clone(), seed: self.seed, init_retries };
                (run_mcmc_sl(model, estimator, &observed, &proposal, &settings).map_err(mcmc_error)?, lambda, tuning)
            }
            SamplerKind::Abc => {
                let mtheta = c.sampler.mahalanobis_theta.clone().unwrap_or_else(|| theta0.clone());
                let batch = simulate_batch(model, &mtheta, c.sampler.mahalanobis_n, self.seed, MAHALANOBIS_COUNTER)
                    .map_err(|e| CliError::Other(anyhow::anyhow!("Mahalanobis simulations: {e}")))?;
                let mcov = mahalanobis_covariance(&batch, c.sampler.outlier_z).map_err(mcmc_error)?;
                let tolerance = *c.sampler.tolerance.as_ref().expect("validated").get_ref();
                let settings = AbcSettings { tolerance, iterations, theta0: theta0.clone(), seed: self.seed, init_retries };
                (run_mcmc_abc(model, &observed, &mcov, &proposal, &settings).map_err(mcmc_error)?, None, None)
            }
        };
        let burnin = c.pilot.as_ref().map_or(iterations / 10, |pl| pl.burnin);
        let pilot_covariance = chain.pilot_covariance(model.transform(), burnin);
        Ok(ChainResult {
            param_names: chain.param_names.clone(),
            chain,
            lambda,
            tuning,
            pilot_covariance,
        })
    }
}

pub fn mcmc_error(e: McmcError) -> CliError {
    match e {
        McmcError::InitializationFailure { .. } => CliError::Init(e.to_string()),
        McmcError::InitialOutsideSupport(_) | McmcError::DimensionMismatch { .. } | McmcError::InvalidSetting(_) => {
            CliError::Config(e.to_string())
        }
        other => CliError::Other(anyhow::anyhow!(other)),
    }
}

pub fn chain_metadata(cfg: &LoadedConfig, seed: u64, res: &ChainResult) -> serde_json::Value {
    let chain = &res.chain;
    let ess: serde_json::Map<String, serde_json::Value> = res
        .param_names
        .iter()
        .enumerate()
        .map(|(j, name)| (name.clone(), json!(effective_sample_size(chain, j))))
        .collect();
    let mut resolved = cfg.config.clone();
    resolved.seed = seed;
    json!({
        "config": resolved,
        "config_path": cfg.path.display().to_string(),
        "seed": seed,
        "method": chain.method,
        "n": chain.n_sim,
        "iterations": chain.len(),
        "lambda": res.lambda,
        "shrinkage_profile": res.tuning.as_ref().map(|t| t.profile.iter().map(|(l, s)| json!({"lambda": l, "std": finite_or_null(*s)})).collect::<Vec<_>>()),
        "acceptance_rate": chain.acceptance_rate(),
        "ess": ess,
        "initial": chain.initial,
        "initial_loglike": chain.initial_loglike,
        "parameters": res.param_names,
    })
}

fn finite_or_null(v: f64) -> serde_json::Value {
    if v.is_finite() {
        json!(v)
    } else {
        serde_json::Value::Null
    }
}

pub fn output_dir(cfg: &LoadedConfig, out: Option<PathBuf>) -> Result<PathBuf, CliError> {
    let dir = out.or_else(|| cfg.config.output.as_ref().map(|p| cfg.resolve(p))).ok_or_else(|| {
        CliError::Config(format!("{}: no output directory (set `output` or pass --out)", cfg.path.display()))
    })?;
    std::fs::create_dir_all(&dir).map_err(|e| CliError::Other(anyhow::anyhow!("cannot create {}: {e}", dir.display())))?;
    Ok(dir)
}

pub fn write_timing(dir: &Path, start: Instant, workers: usize) -> anyhow::Result<()> {
    write_json(&dir.join("timing.json"), &json!({ "wall_seconds": start.elapsed().as_secs_f64(), "workers": workers }))
}

pub fn cmd_run(cfg: &LoadedConfig, seed: u64, out: PathBuf, pilot: bool, workers: usize) -> Result<(), CliError> {
    let start = Instant::now();
    let res = crate::dispatch::dispatch(cfg, ChainRun { cfg, seed, n: None })?;
    write_chain(&out.join("chain.csv"), &res.chain)?;
    write_json(&out.join("metadata.json"), &chain_metadata(cfg, seed, &res))?;
    if pilot {
        let cov = res.pilot_covariance.as_ref().ok_or_else(|| {
            CliError::Other(anyhow::anyhow!("pilot chain is too short after burn-in to estimate a covariance"))
        })?;
        write_matrix(&out.join("proposal.csv"), &res.param_names, cov)?;
    }
    write_timing(&out, start, workers)?;
    write_manifest(&out)?;
    println!(
        "{} iterations, acceptance rate {:.3}, output in {}",
        res.chain.len(),
        res.chain.acceptance_rate(),
        out.display()
    );
    Ok(())
}
