//! `study`: estimator bias/std tables, sensitivity to n, shrinkage tuning.

use std::path::Path;

use semibsl::diagnostics::{
    chain_marginal, estimator_bias_std_study, marginal_total_variation, Axis, MarginalDensity, StudyConfig,
};
use semibsl::estimators::tune_shrinkage;
use semibsl::models::SimulatorModel;
use serde_json::json;

use crate::config::LoadedConfig;
use crate::dispatch::{dispatch, ModelTask};
use crate::io::{write_chain, write_json, write_manifest};
use crate::run::{chain_metadata, lambda_grid, ChainRun};
use crate::CliError;

fn csv_err(e: csv::Error) -> CliError {
    CliError::Other(e.into())
}

pub struct AppendixArgs {
    pub d: usize,
    pub epsilon: f64,
    pub deltas: Vec<f64>,
    pub n_grid: Vec<usize>,
    pub replicates: usize,
    pub seed: u64,
}

/// Writes `table.csv` (one row per delta, n and estimator) and
/// `replicates.csv` (every estimate, `-inf` kept).
pub fn appendix_a(args: &AppendixArgs, out: &Path) -> Result<(), CliError> {
    if args.d == 0 || args.replicates < 2 || args.n_grid.iter().any(|&n| n < 3) || args.n_grid.is_empty() {
        return Err(CliError::Config("appendixA needs d >= 1, replicates >= 2 and every n >= 3".into()));
    }
    let mut table = csv::Writer::from_path(out.join("table.csv")).map_err(csv_err)?;
    table.write_record(["epsilon", "delta", "n", "estimator", "bias", "std", "neg_inf_count"]).map_err(csv_err)?;
    let mut reps = csv::Writer::from_path(out.join("replicates.csv")).map_err(csv_err)?;
    reps.write_record(["epsilon", "delta", "n", "replicate", "truth", "gaussian", "semiparametric"]).map_err(csv_err)?;
    for &delta in &args.deltas {
        let cfg = StudyConfig {
            d: args.d,
            epsilon: args.epsilon,
            delta,
            n_grid: args.n_grid.clone(),
            replicates: args.replicates,
            seed: args.seed,
        };
        let study = estimator_bias_std_study(&cfg).map_err(|e| CliError::Config(e.to_string()))?;
        for r in &study.rows {
            table
                .write_record([
                    args.epsilon.to_string(),
                    delta.to_string(),
                    r.n.to_string(),
                    r.estimator.as_str().to_string(),
                    r.bias.to_string(),
                    r.std.to_string(),
                    r.neg_inf_count.to_string(),
                ])
                .map_err(csv_err)?;
        }
        for r in &study.replicates {
            reps.write_record([
                args.epsilon.to_string(),
                delta.to_string(),
                r.n.to_string(),
                r.replicate.to_string(),
                r.truth.to_string(),
                r.gaussian.to_string(),
                r.semiparametric.to_string(),
            ])
            .map_err(csv_err)?;
        }
    }
    table.flush().map_err(|e| CliError::Other(e.into()))?;
    reps.flush().map_err(|e| CliError::Other(e.into()))?;
    write_json(
        &out.join("study.json"),
        &json!({
            "study": "appendixA",
            "d": args.d,
            "epsilon": args.epsilon,
            "deltas": args.deltas,
            "n_grid": args.n_grid,
            "replicates": args.replicates,
            "seed": args.seed,
        }),
    )?;
    Ok(())
}

/// Cells of the marginal density grids written for overlay plots.
const MARGINAL_CELLS: usize = 256;

/// Runs the configured chain once per `n` and compares marginals.
pub fn sensitivity_n(cfg: &LoadedConfig, seed: u64, n_grid: &[usize], out: &Path) -> Result<f64, CliError> {
    if n_grid.len() < 2 || n_grid.iter().any(|&n| n < 3) {
        return Err(CliError::Config("sensitivity_n needs at least two values of n, each >= 3".into()));
    }
    let burnin = cfg.config.pilot.as_ref().map_or(cfg.iterations() / 10, |p| p.burnin);
    let mut chains = Vec::new();
    for &n in n_grid {
        let res = dispatch(cfg, ChainRun { cfg, seed, n: Some(n) })?;
        write_chain(&out.join(format!("chain_n{n}.csv")), &res.chain)?;
        write_json(&out.join(format!("metadata_n{n}.json")), &chain_metadata(cfg, seed, &res))?;
        chains.push(res.chain);
    }
    if burnin >= chains[0].len() {
        return Err(CliError::Config(format!("burn-in {burnin} leaves no draws")));
    }
    let names = chains[0].param_names.clone();
    let mut curves = csv::Writer::from_path(out.join("marginals.csv")).map_err(csv_err)?;
    curves.write_record(["n", "parameter", "x", "density"]).map_err(csv_err)?;
    let mut pairs = csv::Writer::from_path(out.join("pairwise_tv.csv")).map_err(csv_err)?;
    pairs.write_record(["parameter", "n_a", "n_b", "tv"]).map_err(csv_err)?;
    let mut worst: f64 = 0.0;
    for (j, name) in names.iter().enumerate() {
        let (lo, hi) = chains
            .iter()
            .flat_map(|c| c.draws.iter().skip(burnin).map(|d| d[j]))
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
        let pad = 0.25 * (hi - lo).max(1e-12);
        let axis = Axis::new(lo - pad, hi + pad, MARGINAL_CELLS).map_err(|e| CliError::Other(e.into()))?;
        let marginals: Vec<MarginalDensity> = chains
            .iter()
            .map(|c| chain_marginal(c, j, burnin, axis))
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::Other(e.into()))?;
        for (m, &n) in marginals.iter().zip(n_grid) {
            for (x, dens) in m.grid().iter().zip(m.density.iter()) {
                curves
                    .write_record([n.to_string(), name.clone(), x.to_string(), dens.to_string()])
                    .map_err(csv_err)?;
            }
        }
        for a in 0..marginals.len() {
            for b in a + 1..marginals.len() {
                let tv = marginal_total_variation(&marginals[a], &marginals[b]).map_err(|e| CliError::Other(e.into()))?;
                worst = worst.max(tv);
                pairs
                    .write_record([name.clone(), n_grid[a].to_string(), n_grid[b].to_string(), tv.to_string()])
                    .map_err(csv_err)?;
            }
        }
    }
    curves.flush().map_err(|e| CliError::Other(e.into()))?;
    pairs.flush().map_err(|e| CliError::Other(e.into()))?;
    write_json(
        &out.join("study.json"),
        &json!({ "study": "sensitivity_n", "n_grid": n_grid, "seed": seed, "burnin": burnin, "max_pairwise_tv": worst }),
    )?;
    Ok(worst)
}

struct Tune {
    target: f64,
    theta: Option<Vec<f64>>,
    n: usize,
    replicates: usize,
    seed: u64,
}

impl ModelTask for Tune {
    type Output = semibsl::estimators::ShrinkageTuning;

    fn run<M: SimulatorModel>(self, model: &M, observed: Vec<f64>) -> Result<Self::Output, CliError> {
        let theta = self.theta.unwrap_or_default();
        if theta.len() != model.param_names().len() {
            return Err(CliError::Config(format!(
                "tuning point has {} values, model takes {}",
                theta.len(),
                model.param_names().len()
            )));
        }
        tune_shrinkage(model, &theta, &observed, self.n, self.target, &lambda_grid(), self.replicates, self.seed)
            .map_err(|e| CliError::Other(anyhow::anyhow!("{e}")))
    }
}

/// Picks the largest lambda whose log-likelihood spread meets `target`.
pub fn shrinkage_tune(
    cfg: &LoadedConfig,
    seed: u64,
    target: Option<f64>,
    theta: Option<Vec<f64>>,
    out: &Path,
) -> Result<f64, CliError> {
    let est = cfg.config.estimator.as_ref();
    let target = target
        .or_else(|| est.and_then(|e| e.target_std.as_ref().map(|t| *t.get_ref())))
        .ok_or_else(|| CliError::Config("no target std (pass --target or set estimator.target_std)".into()))?;
    let replicates = est.map_or(50, |e| e.tune_replicates);
    let theta = theta.or_else(|| Some(cfg.config.sampler.theta0.get_ref().clone()));
    let tuning = dispatch(cfg, Tune { target, theta: theta.clone(), n: cfg.n(), replicates, seed })?;
    let mut w = csv::Writer::from_path(out.join("profile.csv")).map_err(csv_err)?;
    w.write_record(["lambda", "std"]).map_err(csv_err)?;
    for (l, s) in &tuning.profile {
        w.write_record([l.to_string(), s.to_string()]).map_err(csv_err)?;
    }
    w.flush().map_err(|e| CliError::Other(e.into()))?;
    write_json(
        &out.join("study.json"),
        &json!({
            "study": "shrinkage_tune",
            "target_std": target,
            "theta": theta,
            "n": cfg.n(),
            "replicates": replicates,
            "seed": seed,
            "lambda": tuning.lambda,
        }),
    )?;
    Ok(tuning.lambda)
}

pub fn finish(out: &Path) -> Result<(), CliError> {
    write_manifest(out)?;
    Ok(())
}
