use nalgebra::DMatrix;

use super::DiagnosticsError;
use crate::estimators::silverman_bandwidth;
use crate::mcmc::Chain;
use crate::special::norm_pdf;

/// Uniform partition of `[lo, hi]` into `cells` cells, evaluated at the
/// cell centres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Axis {
    pub lo: f64,
    pub hi: f64,
    pub cells: usize,
}

impl Axis {
    pub fn new(lo: f64, hi: f64, cells: usize) -> Result<Self, DiagnosticsError> {
        if !(lo < hi) || !lo.is_finite() || !hi.is_finite() || cells == 0 {
            return Err(DiagnosticsError::InvalidGrid(format!("axis [{lo}, {hi}] with {cells} cells")));
        }
        Ok(Axis { lo, hi, cells })
    }

    pub fn width(&self) -> f64 {
        (self.hi - self.lo) / self.cells as f64
    }

    pub fn centres(&self) -> Vec<f64> {
        let w = self.width();
        (0..self.cells).map(|k| self.lo + (k as f64 + 0.5) * w).collect()
    }

    fn nearest(&self, x: f64) -> usize {
        (((x - self.lo) / self.width()).floor().max(0.0) as usize).min(self.cells - 1)
    }

    /// Kernel weights of one point at every centre; a bandwidth far below
    /// the cell width puts all weight in the containing cell.
    fn kernel_row(&self, x: f64, h: f64) -> Vec<f64> {
        if h > 1e-3 * self.width() {
            self.centres().iter().map(|c| norm_pdf((c - x) / h) / h).collect()
        } else {
            let mut row = vec![0.0; self.cells];
            row[self.nearest(x)] = 1.0 / self.width();
            row
        }
    }
}

/// Normalised density on a 2-D grid of cell centres, indexed `[(ix, iy)]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GridDensity {
    pub x: Axis,
    pub y: Axis,
    pub density: DMatrix<f64>,
}

impl GridDensity {
    /// Normalises nonnegative cell values so that cell masses sum to one.
    pub fn from_values(x: Axis, y: Axis, mut values: DMatrix<f64>) -> Result<Self, DiagnosticsError> {
        if values.shape() != (x.cells, y.cells) {
            return Err(DiagnosticsError::GridMismatch);
        }
        values.iter_mut().for_each(|v| {
            if !(*v > 0.0) {
                *v = 0.0;
            }
        });
        let total = values.sum() * x.width() * y.width();
        if !(total > 0.0) || !total.is_finite() {
            return Err(DiagnosticsError::NoMass);
        }
        values /= total;
        Ok(GridDensity { x, y, density: values })
    }

    /// Normalises log-density values; `-inf` cells get zero mass.
    pub fn from_log_values(x: Axis, y: Axis, logv: DMatrix<f64>) -> Result<Self, DiagnosticsError> {
        let m = logv.iter().copied().filter(|v| !v.is_nan()).fold(f64::NEG_INFINITY, f64::max);
        if !m.is_finite() {
            return Err(DiagnosticsError::NoMass);
        }
        Self::from_values(x, y, logv.map(|v| (v - m).exp()))
    }

    pub fn x_grid(&self) -> Vec<f64> {
        self.x.centres()
    }

    pub fn y_grid(&self) -> Vec<f64> {
        self.y.centres()
    }

    pub fn cell_masses(&self) -> DMatrix<f64> {
        &self.density * (self.x.width() * self.y.width())
    }

    /// Grid cell with the highest density.
    pub fn mode(&self) -> (f64, f64) {
        let (mut best, mut at) = (f64::NEG_INFINITY, (0, 0));
        for i in 0..self.x.cells {
            for j in 0..self.y.cells {
                if self.density[(i, j)] > best {
                    best = self.density[(i, j)];
                    at = (i, j);
                }
            }
        }
        (self.x.centres()[at.0], self.y.centres()[at.1])
    }
}

/// `1/2 sum |mass1 - mass2|` over cells.
pub fn total_variation(f1: &GridDensity, f2: &GridDensity) -> Result<f64, DiagnosticsError> {
    if f1.x != f2.x || f1.y != f2.y {
        return Err(DiagnosticsError::GridMismatch);
    }
    let cell = f1.x.width() * f1.y.width();
    let tv = 0.5 * f1.density.iter().zip(f2.density.iter()).map(|(a, b)| (a - b).abs()).sum::<f64>() * cell;
    Ok(tv.clamp(0.0, 1.0))
}

fn bandwidth_or_zero(v: &[f64]) -> f64 {
    silverman_bandwidth(v).unwrap_or(0.0)
}

/// Collapses repeated draws (rejections) into weighted unique points.
fn weighted_unique(points: impl Iterator<Item = (f64, f64)>) -> Vec<(f64, f64, f64)> {
    let mut out: Vec<(f64, f64, f64)> = Vec::new();
    for (a, b) in points {
        match out.last_mut() {
            Some(last) if last.0 == a && last.1 == b => last.2 += 1.0,
            _ => out.push((a, b, 1.0)),
        }
    }
    out
}

/// Product Gaussian KDE over `(x, y)` pairs with a Silverman bandwidth per
/// dimension, evaluated on the grid.
pub fn draws_to_grid(xs: &[f64], ys: &[f64], x: Axis, y: Axis) -> Result<GridDensity, DiagnosticsError> {
    draws_to_grid_with_bandwidths(xs, ys, (bandwidth_or_zero(xs), bandwidth_or_zero(ys)), x, y)
}

/// Product Gaussian KDE with given per-dimension bandwidths.
pub fn draws_to_grid_with_bandwidths(
    xs: &[f64],
    ys: &[f64],
    (hx, hy): (f64, f64),
    x: Axis,
    y: Axis,
) -> Result<GridDensity, DiagnosticsError> {
    if xs.is_empty() || xs.len() != ys.len() {
        return Err(DiagnosticsError::EmptyChain);
    }
    let pts = weighted_unique(xs.iter().copied().zip(ys.iter().copied()));
    let mut kx = DMatrix::zeros(x.cells, pts.len());
    let mut ky = DMatrix::zeros(pts.len(), y.cells);
    for (k, &(a, b, w)) in pts.iter().enumerate() {
        for (i, v) in x.kernel_row(a, hx).into_iter().enumerate() {
            kx[(i, k)] = v * w;
        }
        for (j, v) in y.kernel_row(b, hy).into_iter().enumerate() {
            ky[(k, j)] = v;
        }
    }
    GridDensity::from_values(x, y, kx * ky)
}

/// Silverman bandwidth of an autocorrelated sample, with the effective
/// sample size in place of the sample length.
pub fn chain_bandwidth(values: &[f64]) -> f64 {
    let h = bandwidth_or_zero(values);
    if h == 0.0 {
        return 0.0;
    }
    let ess = crate::mcmc::ess_of_series(values);
    h * (values.len() as f64 / ess).powf(0.2)
}

/// Kernel density of components `(i, j)` of the chain after `burnin`,
/// using [`chain_bandwidth`] per dimension.
pub fn chain_to_grid(
    chain: &Chain,
    components: (usize, usize),
    burnin: usize,
    x: Axis,
    y: Axis,
) -> Result<GridDensity, DiagnosticsError> {
    let draws = chain.after_burnin(burnin);
    let xs: Vec<f64> = draws.iter().map(|d| d[components.0]).collect();
    let ys: Vec<f64> = draws.iter().map(|d| d[components.1]).collect();
    if xs.is_empty() {
        return Err(DiagnosticsError::EmptyChain);
    }
    draws_to_grid_with_bandwidths(&xs, &ys, (chain_bandwidth(&xs), chain_bandwidth(&ys)), x, y)
}

/// Normalised 1-D density on cell centres.
#[derive(Debug, Clone, PartialEq)]
pub struct MarginalDensity {
    pub axis: Axis,
    pub density: Vec<f64>,
}

impl MarginalDensity {
    pub fn grid(&self) -> Vec<f64> {
        self.axis.centres()
    }
}

/// Gaussian KDE of `values` with the Silverman bandwidth.
pub fn marginal_kde(values: &[f64], axis: Axis) -> Result<MarginalDensity, DiagnosticsError> {
    marginal_kde_with_bandwidth(values, bandwidth_or_zero(values), axis)
}

/// Marginal density of one chain component after `burnin`, using
/// [`chain_bandwidth`].
pub fn chain_marginal(chain: &Chain, component: usize, burnin: usize, axis: Axis) -> Result<MarginalDensity, DiagnosticsError> {
    let values: Vec<f64> = chain.after_burnin(burnin).iter().map(|d| d[component]).collect();
    if values.is_empty() {
        return Err(DiagnosticsError::EmptyChain);
    }
    marginal_kde_with_bandwidth(&values, chain_bandwidth(&values), axis)
}

pub fn marginal_kde_with_bandwidth(values: &[f64], h: f64, axis: Axis) -> Result<MarginalDensity, DiagnosticsError> {
    if values.is_empty() {
        return Err(DiagnosticsError::EmptyChain);
    }
    let mut density = vec![0.0; axis.cells];
    let mut sorted = values.to_vec();
    sorted.sort_unstable_by(f64::total_cmp);
    let mut i = 0;
    while i < sorted.len() {
        let mut j = i;
        while j < sorted.len() && sorted[j] == sorted[i] {
            j += 1;
        }
        let w = (j - i) as f64;
        for (d, k) in density.iter_mut().zip(axis.kernel_row(sorted[i], h)) {
            *d += w * k;
        }
        i = j;
    }
    let total: f64 = density.iter().sum::<f64>() * axis.width();
    if !(total > 0.0) {
        return Err(DiagnosticsError::NoMass);
    }
    density.iter_mut().for_each(|d| *d /= total);
    Ok(MarginalDensity { axis, density })
}

pub fn marginal_total_variation(a: &MarginalDensity, b: &MarginalDensity) -> Result<f64, DiagnosticsError> {
    if a.axis != b.axis {
        return Err(DiagnosticsError::GridMismatch);
    }
    let tv = 0.5 * a.density.iter().zip(&b.density).map(|(p, q)| (p - q).abs()).sum::<f64>() * a.axis.width();
    Ok(tv.clamp(0.0, 1.0))
}
