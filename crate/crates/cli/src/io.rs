//! CSV readers and writers, and the per-directory manifest.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use nalgebra::DMatrix;
use semibsl::diagnostics::{Axis, GridDensity};
use semibsl::mcmc::Chain;
use serde::Serialize;
use sha2::{Digest, Sha256};

/// Reads a CSV with a header row into columns of numbers.
pub fn read_columns(path: &Path) -> Result<(Vec<String>, Vec<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_path(path).with_context(|| format!("cannot read {}", path.display()))?;
    let header: Vec<String> = rdr.headers()?.iter().map(str::to_string).collect();
    let mut cols = vec![Vec::new(); header.len()];
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec.with_context(|| format!("{}: bad row {}", path.display(), i + 2))?;
        for (j, field) in rec.iter().enumerate() {
            let v: f64 = field
                .trim()
                .parse()
                .with_context(|| format!("{}:{}: '{field}' is not a number", path.display(), i + 2))?;
            cols[j].push(v);
        }
    }
    Ok((header, cols))
}

pub fn read_series(path: &Path) -> Result<Vec<f64>> {
    let (_, cols) = read_columns(path)?;
    if cols.len() != 1 {
        bail!("{}: expected one column, found {}", path.display(), cols.len());
    }
    Ok(cols.into_iter().next().unwrap())
}

pub fn write_series(path: &Path, name: &str, values: &[f64]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([name])?;
    for v in values {
        w.write_record([v.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

/// Rows of a matrix under a header.
pub fn write_matrix(path: &Path, header: &[String], m: &DMatrix<f64>) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(header)?;
    for i in 0..m.nrows() {
        w.write_record(m.row(i).iter().map(f64::to_string))?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_matrix(path: &Path) -> Result<DMatrix<f64>> {
    let (header, cols) = read_columns(path)?;
    let rows = cols.first().map_or(0, Vec::len);
    Ok(DMatrix::from_fn(rows, header.len(), |i, j| cols[j][i]))
}

/// One row per iteration: parameters, `loglike`, `accepted` as 0/1.
pub fn write_chain(path: &Path, chain: &Chain) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut header = chain.param_names.clone();
    header.push("loglike".into());
    header.push("accepted".into());
    w.write_record(&header)?;
    for ((d, ll), a) in chain.draws.iter().zip(&chain.loglikes).zip(&chain.accepted) {
        let mut rec: Vec<String> = d.iter().map(f64::to_string).collect();
        rec.push(ll.to_string());
        rec.push(if *a { "1" } else { "0" }.into());
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_chain(path: &Path) -> Result<Chain> {
    let (header, cols) = read_columns(path)?;
    let p = header.len().checked_sub(2).filter(|_| header.ends_with(&["loglike".to_string(), "accepted".to_string()]));
    let Some(p) = p else {
        bail!("{}: not a chain file (last columns must be loglike, accepted)", path.display());
    };
    let t = cols[0].len();
    if t == 0 {
        bail!("{}: chain has no rows", path.display());
    }
    let draws: Vec<Vec<f64>> = (0..t).map(|i| (0..p).map(|j| cols[j][i]).collect()).collect();
    Ok(Chain {
        param_names: header[..p].to_vec(),
        initial: draws[0].clone(),
        draws,
        loglikes: cols[p].clone(),
        accepted: cols[p + 1].iter().map(|&v| v != 0.0).collect(),
        seed: 0,
        method: String::new(),
        n_sim: 0,
        initial_loglike: f64::NAN,
    })
}

/// First row: `x\y` then the y centres; each further row an x centre
/// followed by density values.
pub fn write_grid(path: &Path, g: &GridDensity) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    let mut head = vec!["x\\y".to_string()];
    head.extend(g.y_grid().iter().map(f64::to_string));
    w.write_record(&head)?;
    for (i, x) in g.x_grid().iter().enumerate() {
        let mut rec = vec![x.to_string()];
        rec.extend(g.density.row(i).iter().map(f64::to_string));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}

/// Reads a grid CSV; centres must be equally spaced.
pub fn read_grid(path: &Path) -> Result<GridDensity> {
    let mut rdr = csv::ReaderBuilder::new().has_headers(false).from_path(path)?;
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let mut ys: Vec<f64> = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if i == 0 {
            ys = rec.iter().skip(1).map(str::parse).collect::<Result<_, _>>().context("grid y axis")?;
        } else {
            rows.push(rec.iter().map(str::parse).collect::<Result<_, _>>().context("grid row")?);
        }
    }
    let xs: Vec<f64> = rows.iter().map(|r| r[0]).collect();
    let axis = |c: &[f64]| -> Result<Axis> {
        if c.len() < 2 {
            bail!("{}: grid axis needs at least two centres", path.display());
        }
        let w = (c[c.len() - 1] - c[0]) / (c.len() - 1) as f64;
        Ok(Axis::new(c[0] - 0.5 * w, c[c.len() - 1] + 0.5 * w, c.len())?)
    };
    let (ax, ay) = (axis(&xs)?, axis(&ys)?);
    let m = DMatrix::from_fn(xs.len(), ys.len(), |i, j| rows[i][j + 1]);
    Ok(GridDensity::from_values(ax, ay, m)?)
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut f = fs::File::create(path)?;
    serde_json::to_writer_pretty(&mut f, value)?;
    f.write_all(b"\n")?;
    Ok(())
}

/// Files never listed in the manifest: the manifest itself and wall-clock
/// timings, which differ between otherwise identical runs.
const UNHASHED: [&str; 2] = ["manifest.json", "timing.json"];

/// Writes `manifest.json` with the SHA-256 of every other file under `dir`.
pub fn write_manifest(dir: &Path) -> Result<()> {
    let mut files: Vec<PathBuf> = Vec::new();
    collect(dir, dir, &mut files)?;
    files.sort();
    let entries: Vec<serde_json::Value> = files
        .iter()
        .filter(|p| !UNHASHED.contains(&p.to_string_lossy().as_ref()))
        .map(|rel| -> Result<serde_json::Value> {
            let bytes = fs::read(dir.join(rel))?;
            Ok(serde_json::json!({
                "path": rel.to_string_lossy().replace('\\', "/"),
                "sha256": hex::encode(Sha256::digest(&bytes)),
                "bytes": bytes.len(),
            }))
        })
        .collect::<Result<_>>()?;
    write_json(&dir.join("manifest.json"), &serde_json::json!({ "files": entries }))
}

fn collect(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) -> Result<()> {
    for entry in fs::read_dir(dir)? {
        let path = entry?.path();
        if path.is_dir() {
            collect(root, &path, out)?;
        } else {
            out.push(path.strip_prefix(root)?.to_path_buf());
        }
    }
    Ok(())
}
