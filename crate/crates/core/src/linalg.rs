//! Cholesky factorisation with a bounded diagonal-jitter repair.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

/// Jitter added on the first retry, per unit of dimension.
pub const BASE_JITTER: f64 = 1e-10;
/// Number of jittered retries after the plain attempt.
pub const MAX_JITTER_RETRIES: usize = 3;

#[derive(Clone, Debug)]
pub struct JitteredCholesky {
    pub factor: Cholesky<f64, Dyn>,
    /// Diagonal jitter that made the factorisation succeed (0 if none).
    pub jitter: f64,
    /// Number of jittered retries that were needed.
    pub retries: usize,
}

impl JitteredCholesky {
    /// `ln |A|` of the (jittered) matrix.
    pub fn log_det(&self) -> f64 {
        let l = self.factor.l_dirty();
        2.0 * (0..l.nrows()).map(|i| l[(i, i)].ln()).sum::<f64>()
    }

    /// `x^T A^{-1} x` via one triangular solve.
    pub fn inv_quad_form(&self, x: &DVector<f64>) -> f64 {
        let l = self.factor.l();
        let y = l
            .solve_lower_triangular(x)
            .expect("Cholesky factor has a positive diagonal");
        y.norm_squared()
    }
}

/// Factorises a symmetric matrix, retrying with `1e-10 * d`, `1e-9 * d` and
/// `1e-8 * d` added to the diagonal. Returns `None` when every attempt fails.
pub fn cholesky_with_jitter(a: &DMatrix<f64>) -> Option<JitteredCholesky> {
    if a.iter().any(|v| !v.is_finite()) {
        return None;
    }
    if let Some(factor) = Cholesky::new(a.clone()) {
        return Some(JitteredCholesky { factor, jitter: 0.0, retries: 0 });
    }
    let d = a.nrows();
    let mut jitter = BASE_JITTER * d as f64;
    for retry in 1..=MAX_JITTER_RETRIES {
        let mut b = a.clone();
        for i in 0..d {
            b[(i, i)] += jitter;
        }
        if let Some(factor) = Cholesky::new(b) {
            return Some(JitteredCholesky { factor, jitter, retries: retry });
        }
        jitter *= 10.0;
    }
    None
}
