use nalgebra::DMatrix;

use super::EstimatorError;

/// `n x d` matrix of simulated summary statistics (rows are simulations).
#[derive(Debug, Clone, PartialEq)]
pub struct StatisticBatch {
    values: DMatrix<f64>,
}

impl StatisticBatch {
    pub const MIN_ROWS: usize = 3;

    pub fn new(values: DMatrix<f64>) -> Result<Self, EstimatorError> {
        if values.nrows() < Self::MIN_ROWS {
            return Err(EstimatorError::InvalidBatch(format!(
                "need at least {} simulations, got {}",
                Self::MIN_ROWS,
                values.nrows()
            )));
        }
        if values.ncols() == 0 {
            return Err(EstimatorError::InvalidBatch("statistic dimension is zero".into()));
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            let (r, c) = (pos % values.nrows(), pos / values.nrows());
            return Err(EstimatorError::InvalidBatch(format!(
                "non-finite entry at row {r}, column {c}"
            )));
        }
        Ok(StatisticBatch { values })
    }

    /// Builds a batch from row vectors of equal length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self, EstimatorError> {
        let d = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != d) {
            return Err(EstimatorError::InvalidBatch("ragged rows".into()));
        }
        let values = DMatrix::from_fn(rows.len(), d, |i, j| rows[i][j]);
        Self::new(values)
    }

    pub fn n(&self) -> usize {
        self.values.nrows()
    }

    pub fn d(&self) -> usize {
        self.values.ncols()
    }

    pub fn values(&self) -> &DMatrix<f64> {
        &self.values
    }

    /// Contiguous view of one statistic across all simulations.
    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n();
        &self.values.as_slice()[j * n..(j + 1) * n]
    }

    pub(crate) fn check_observed(&self, observed: &[f64]) -> Result<(), EstimatorError> {
        if observed.len() != self.d() {
            return Err(EstimatorError::DimensionMismatch { expected: self.d(), found: observed.len() });
        }
        Ok(())
    }
}
