//! Builds the configured model and observed statistic, then hands them to
//! a generic task.

use std::path::Path;

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use semibsl::models::{
    BoomBust, Ma2, Mg1, SimulatorModel, SinhArcsinhParams, StatTransform, Stereo, Toads, ToadsData, Transformed,
};
use semibsl::rng::{stream, substream};

use crate::config::{LoadedConfig, ModelId, TransformKind};
use crate::io::{read_columns, read_series, write_series};
use crate::CliError;

/// Work that needs a concrete model type.
pub trait ModelTask {
    type Output;
    fn run<M: SimulatorModel>(self, model: &M, observed: Vec<f64>) -> Result<Self::Output, CliError>;
}

fn read_toads(path: &Path) -> Result<ToadsData> {
    let (_, cols) = read_columns(path)?;
    let days = cols.first().map_or(0, Vec::len);
    if days < 2 {
        bail!("{}: toads data needs at least two days", path.display());
    }
    Ok(DMatrix::from_fn(days, cols.len(), |i, j| cols[j][i]))
}

fn stat_transform(cfg: &LoadedConfig, d: usize) -> Result<Option<StatTransform>, CliError> {
    let Some(t) = &cfg.config.transform else { return Ok(None) };
    let bad = |e: semibsl::models::ModelError| CliError::Config(format!("{}: transform: {e}", cfg.path.display()));
    Ok(match t.kind {
        TransformKind::None => None,
        TransformKind::SinhArcsinh => {
            let params = match t.random_seed {
                Some(seed) => SinhArcsinhParams::random(d, &mut substream(seed, stream::SETUP, 0, 0)),
                None => {
                    let eps = t.epsilon.as_ref().map_or(0.0, |v| *v.get_ref());
                    let delta = t.delta.as_ref().map_or(1.0, |v| *v.get_ref());
                    vec![SinhArcsinhParams::new(eps, delta).map_err(bad)?]
                }
            };
            Some(StatTransform::SinhArcsinh(params))
        }
        TransformKind::Power => Some(StatTransform::Power(t.power.as_ref().map_or(1.0, |v| *v.get_ref()))),
    })
}

fn finish<M: SimulatorModel, T: ModelTask>(
    cfg: &LoadedConfig,
    model: M,
    data: &M::Data,
    task: T,
) -> Result<T::Output, CliError> {
    match stat_transform(cfg, model.stat_dim())? {
        None => {
            let observed = model.summarize(data).map_err(|e| CliError::Config(format!("observed data: {e}")))?;
            task.run(&model, observed)
        }
        Some(st) => {
            let wrapped = Transformed::new(model, st).map_err(|e| CliError::Config(e.to_string()))?;
            let observed = wrapped.summarize(data).map_err(|e| CliError::Config(format!("observed data: {e}")))?;
            task.run(&wrapped, observed)
        }
    }
}

pub fn dispatch<T: ModelTask>(cfg: &LoadedConfig, task: T) -> Result<T::Output, CliError> {
    let path = cfg.resolve(cfg.config.model.observed.get_ref());
    let data_err = |e: anyhow::Error| CliError::Config(format!("model.observed: {e:#}"));
    match cfg.config.model.id {
        ModelId::Ma2 => {
            let y = read_series(&path).map_err(data_err)?;
            finish(cfg, Ma2::new(y.len()), &y, task)
        }
        ModelId::Mg1 => {
            let y = read_series(&path).map_err(data_err)?;
            finish(cfg, Mg1::new(y.len() + 1), &y, task)
        }
        ModelId::Stereo => {
            let y = read_series(&path).map_err(data_err)?;
            finish(cfg, Stereo::default(), &y, task)
        }
        ModelId::Boombust => {
            let y = read_series(&path).map_err(data_err)?;
            let mut model = BoomBust::default();
            model.len = y.len();
            finish(cfg, model, &y, task)
        }
        ModelId::Toads => {
            let y = read_toads(&path).map_err(data_err)?;
            let model = Toads::from_observed(&y, cfg.config.model.auxiliary_seed)
                .map_err(|e| CliError::Other(anyhow::anyhow!("auxiliary fit: {e}")))?;
            finish(cfg, model, &y, task)
        }
    }
}

/// Simulates a raw dataset for `model` at `theta` and writes it as CSV.
pub fn observe(model: ModelId, theta: &[f64], seed: u64, out: &Path) -> Result<usize> {
    use semibsl::models::observed_dataset;
    let check = |p: usize| -> Result<()> {
        if theta.len() != p {
            bail!("{} takes {p} parameters, got {}", model.as_str(), theta.len());
        }
        Ok(())
    };
    let series = match model {
        ModelId::Ma2 => {
            check(2)?;
            observed_dataset(&Ma2::default(), theta, seed)?
        }
        ModelId::Mg1 => {
            check(3)?;
            observed_dataset(&Mg1::default(), theta, seed)?
        }
        ModelId::Stereo => {
            check(3)?;
            observed_dataset(&Stereo::default(), theta, seed)?
        }
        ModelId::Boombust => {
            check(4)?;
            observed_dataset(&BoomBust::default(), theta, seed)?
        }
        ModelId::Toads => {
            check(3)?;
            let mut rng = substream(seed, stream::DATASET, 0, 0);
            let y = semibsl::models::toads_simulate(theta, Toads::TOADS, Toads::DAYS, &mut rng)?;
            let mut w = csv::Writer::from_path(out).with_context(|| format!("cannot write {}", out.display()))?;
            w.write_record((1..=y.ncols()).map(|j| format!("toad_{j}")))?;
            for i in 0..y.nrows() {
                w.write_record(y.row(i).iter().map(f64::to_string))?;
            }
            w.flush()?;
            return Ok(y.len());
        }
    };
    write_series(out, "y", &series)?;
    Ok(series.len())
}
