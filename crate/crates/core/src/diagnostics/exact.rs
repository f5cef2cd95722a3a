use nalgebra::DMatrix;

use super::{Axis, DiagnosticsError, GridDensity};
use crate::mcmc::{Ma2TrianglePrior, Prior};
use crate::models::ma2_exact_loglike;

/// MA(2) posterior under the uniform triangle prior, evaluated by exact
/// likelihood times prior at each cell centre and normalised.
pub fn exact_ma2_posterior_grid(y: &[f64], x_axis: Axis, y_axis: Axis) -> Result<GridDensity, DiagnosticsError> {
    let xs = x_axis.centres();
    let ys = y_axis.centres();
    let prior = Ma2TrianglePrior;
    let cells: Vec<f64> = crate::par::map_indices(x_axis.cells * y_axis.cells, |k| {
        let theta = [xs[k / y_axis.cells], ys[k % y_axis.cells]];
        let lp = prior.log_density(&theta);
        if lp == f64::NEG_INFINITY {
            return lp;
        }
        let ll = if y.is_empty() { 0.0 } else { ma2_exact_loglike(&theta, y).unwrap_or(f64::NEG_INFINITY) };
        ll + lp
    });
    let logv = DMatrix::from_fn(x_axis.cells, y_axis.cells, |i, j| cells[i * y_axis.cells + j]);
    GridDensity::from_log_values(x_axis, y_axis, logv)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::{draws_to_grid, total_variation};
    use crate::models::{observed_dataset, Ma2};

    #[test]
    fn empty_data_gives_uniform_triangle() {
        let (ax, ay) = (Axis::new(-2.0, 2.0, 40).unwrap(), Axis::new(-1.0, 1.0, 20).unwrap());
        let g = exact_ma2_posterior_grid(&[], ax, ay).unwrap();
        let nonzero: Vec<f64> = g.density.iter().copied().filter(|&v| v > 0.0).collect();
        assert!(nonzero.iter().all(|v| (v - nonzero[0]).abs() < 1e-12));
        // cells whose centre lies in the triangle: about half of the box
        let frac = nonzero.len() as f64 / 800.0;
        assert!((frac - 0.5).abs() < 0.05, "{frac}");
    }

    #[test]
    fn mode_near_truth_and_refinement_is_stable() {
        let model = Ma2::default();
        let y = observed_dataset(&model, &Ma2::TRUE_PARAMS, 1).unwrap();
        let coarse = exact_ma2_posterior_grid(&y, Axis::new(-0.5, 1.5, 100).unwrap(), Axis::new(-0.8, 1.0, 90).unwrap())
            .unwrap();
        let (m1, m2) = coarse.mode();
        assert!((m1 - 0.6).abs() < 0.35 && (m2 - 0.2).abs() < 0.35, "{m1} {m2}");
        let fine = exact_ma2_posterior_grid(&y, Axis::new(-0.5, 1.5, 200).unwrap(), Axis::new(-0.8, 1.0, 180).unwrap())
            .unwrap();
        // compare both against the same fixed density on their own grids
        let mut rng = crate::rng::substream(3, 0, 0, 0);
        let (xs, ys): (Vec<f64>, Vec<f64>) = (0..20_000)
            .map(|_| {
                use rand_distr::{Distribution, StandardNormal};
                let a: f64 = StandardNormal.sample(&mut rng);
                let b: f64 = StandardNormal.sample(&mut rng);
                (m1 + 0.15 * a, m2 + 0.15 * b)
            })
            .unzip();
        let tv_c = total_variation(&coarse, &draws_to_grid(&xs, &ys, coarse.x, coarse.y).unwrap()).unwrap();
        let tv_f = total_variation(&fine, &draws_to_grid(&xs, &ys, fine.x, fine.y).unwrap()).unwrap();
        assert!((tv_c - tv_f).abs() < 0.01, "{tv_c} {tv_f}");
    }
}
