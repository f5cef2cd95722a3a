//! `tv`: total variation between a chain and a reference.

use std::path::PathBuf;

use semibsl::diagnostics::{
    chain_marginal, chain_to_grid, exact_ma2_posterior_grid, marginal_total_variation, total_variation, Axis,
};
use semibsl::mcmc::Chain;
use serde_json::json;

use crate::io::{read_chain, read_grid, read_series, write_grid, write_json, write_manifest};
use crate::CliError;

pub enum Reference {
    Chain(PathBuf),
    /// Exact MA(2) posterior for the observed series at this path.
    ExactMa2(PathBuf),
    /// A grid CSV written by an earlier `tv` call.
    Grid(PathBuf),
}

pub struct TvArgs {
    pub chain: PathBuf,
    pub reference: Reference,
    pub components: Vec<usize>,
    pub burnin: usize,
    /// `(lo, hi, cells)` per component; derived from the draws when absent.
    pub axes: Vec<(f64, f64, usize)>,
    pub out: Option<PathBuf>,
}

fn input_err(e: anyhow::Error) -> CliError {
    CliError::Config(format!("{e:#}"))
}

fn diag_err(e: semibsl::diagnostics::DiagnosticsError) -> CliError {
    CliError::Config(e.to_string())
}

/// Range of the post-burn-in draws padded by a quarter on each side.
fn auto_axis(chains: &[&Chain], j: usize, burnin: usize, cells: usize) -> Result<Axis, CliError> {
    let vals = chains.iter().flat_map(|c| c.draws.iter().skip(burnin).map(move |d| d[j]));
    let (lo, hi) = vals.fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), v| (lo.min(v), hi.max(v)));
    let pad = if hi > lo { 0.25 * (hi - lo) } else { 0.5 * lo.abs().max(1.0) };
    Axis::new(lo - pad, hi + pad, cells).map_err(diag_err)
}

pub fn cmd_tv(args: TvArgs) -> Result<f64, CliError> {
    let chain = read_chain(&args.chain).map_err(input_err)?;
    let p = chain.dim();
    if args.components.is_empty() || args.components.len() > 2 || args.components.iter().any(|&j| j >= p) {
        return Err(CliError::Config(format!("--components must name one or two of the chain's {p} parameters")));
    }
    if args.burnin >= chain.len() {
        return Err(CliError::Config(format!("--burnin {} leaves no draws of {}", args.burnin, chain.len())));
    }
    if !args.axes.is_empty() && args.axes.len() != args.components.len() {
        return Err(CliError::Config("give one --axis per component".into()));
    }
    let other = match &args.reference {
        Reference::Chain(path) => Some(read_chain(path).map_err(input_err)?),
        _ => None,
    };
    if let Some(o) = &other {
        if o.dim() != p {
            return Err(CliError::Config(format!("chains have {p} and {} parameters", o.dim())));
        }
    }
    let pooled: Vec<&Chain> = std::iter::once(&chain).chain(other.as_ref()).collect();
    let axis = |k: usize, default_cells: usize| -> Result<Axis, CliError> {
        match args.axes.get(k) {
            Some(&(lo, hi, cells)) => Axis::new(lo, hi, cells).map_err(diag_err),
            None => auto_axis(&pooled, args.components[k], args.burnin, default_cells),
        }
    };
    let (tv, grid) = if args.components.len() == 1 {
        let ax = axis(0, 512)?;
        let j = args.components[0];
        let a = chain_marginal(&chain, j, args.burnin, ax).map_err(diag_err)?;
        let b = match (&args.reference, &other) {
            (Reference::Chain(_), Some(o)) => chain_marginal(o, j, args.burnin, ax).map_err(diag_err)?,
            _ => return Err(CliError::Config("a single component needs a chain reference".into())),
        };
        (marginal_total_variation(&a, &b).map_err(diag_err)?, None)
    } else {
        let (i, j) = (args.components[0], args.components[1]);
        let reference = match (&args.reference, &other) {
            (Reference::Chain(_), Some(o)) => {
                let (ax, ay) = (axis(0, 200)?, axis(1, 200)?);
                chain_to_grid(o, (i, j), args.burnin, ax, ay).map_err(diag_err)?
            }
            (Reference::ExactMa2(path), _) => {
                let y = read_series(path).map_err(input_err)?;
                let (ax, ay) = match args.axes.as_slice() {
                    [] => (Axis::new(-2.0, 2.0, 400).map_err(diag_err)?, Axis::new(-1.0, 1.0, 200).map_err(diag_err)?),
                    _ => (axis(0, 400)?, axis(1, 200)?),
                };
                exact_ma2_posterior_grid(&y, ax, ay).map_err(diag_err)?
            }
            (Reference::Grid(path), _) => read_grid(path).map_err(input_err)?,
            (Reference::Chain(_), None) => unreachable!(),
        };
        let est = chain_to_grid(&chain, (i, j), args.burnin, reference.x, reference.y).map_err(diag_err)?;
        (total_variation(&est, &reference).map_err(diag_err)?, Some(reference))
    };
    if let Some(dir) = &args.out {
        std::fs::create_dir_all(dir).map_err(|e| CliError::Other(e.into()))?;
        let names: Vec<&str> = args.components.iter().map(|&j| chain.param_names[j].as_str()).collect();
        write_json(
            &dir.join("tv.json"),
            &json!({
                "chain": args.chain.display().to_string(),
                "components": names,
                "burnin": args.burnin,
                "tv": tv,
            }),
        )?;
        if let Some(g) = &grid {
            write_grid(&dir.join("reference_grid.csv"), g)?;
        }
        write_manifest(dir)?;
    }
    Ok(tv)
}
