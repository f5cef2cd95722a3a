//! Gaussian rank correlation.
//!
//! Each column is replaced by normal scores `Phi^{-1}(r / (n + 1))` of its
//! ranks, and the correlation is the cross product of scores divided by the
//! sum of squared scores of `1..n`. Tied values get midranks.

use nalgebra::DMatrix;

use super::StatisticBatch;
use crate::special::norm_ppf;

/// Symmetric matrix with unit diagonal and entries in `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationMatrix(DMatrix<f64>);

impl CorrelationMatrix {
    /// Wraps a matrix after forcing symmetry, unit diagonal and `[-1, 1]` entries.
    pub fn from_matrix(mut m: DMatrix<f64>) -> Self {
        let d = m.nrows();
        assert_eq!(d, m.ncols(), "correlation matrix must be square");
        for j in 0..d {
            m[(j, j)] = 1.0;
            for i in (j + 1)..d {
                let v = (0.5 * (m[(i, j)] + m[(j, i)])).clamp(-1.0, 1.0);
                m[(i, j)] = v;
                m[(j, i)] = v;
            }
        }
        CorrelationMatrix(m)
    }

    pub fn identity(d: usize) -> Self {
        CorrelationMatrix(DMatrix::identity(d, d))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }
}

/// Midranks (1-based) of `values`; ties share the average of their ranks.
pub fn midranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| values[a].total_cmp(&values[b]));
    ranks_from_order(values, &order)
}

pub(crate) fn ranks_from_order(values: &[f64], order: &[usize]) -> Vec<f64> {
    let n = values.len();
    let mut ranks = vec![0.0; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end hold ranks start+1..=end
        let rank = 0.5 * ((start + 1) + end) as f64;
        for &idx in &order[start..end] {
            ranks[idx] = rank;
        }
        start = end;
    }
    ranks
}

/// Normal scores `Phi^{-1}(k / (n + 1))` for `k = 1..=n`, exactly antisymmetric
/// about the middle rank.
pub(crate) fn score_table(n: usize) -> Vec<f64> {
    let denom = (n + 1) as f64;
    let mut table = vec![0.0; n];
    for k in 1..=n {
        let mirror = n + 1 - k;
        table[k - 1] = if k < mirror {
            norm_ppf(k as f64 / denom)
        } else if k == mirror {
            0.0
        } else {
            -table[mirror - 1]
        };
    }
    table
}

pub(crate) fn score_for_rank(rank: f64, table: &[f64]) -> f64 {
    if rank.fract() == 0.0 {
        table[rank as usize - 1]
    } else {
        norm_ppf(rank / (table.len() + 1) as f64)
    }
}

/// Normal-score matrix (`n x d`) plus the normaliser `sum_k Phi^{-1}(k/(n+1))^2`.
pub(crate) struct RankScores {
    pub scores: DMatrix<f64>,
    pub normaliser: f64,
    /// Integer ranks of tie-free columns, used to pin exact `+-1` entries.
    permutations: Vec<Option<Vec<usize>>>,
}

impl RankScores {
    pub fn correlation(&self) -> CorrelationMatrix {
        let mut cross = self.scores.tr_mul(&self.scores) / self.normaliser;
        // Rounding in the matrix product can leave identical or reversed
        // rankings a few ulps short of +-1.
        let n = self.scores.nrows();
        for (i, pi) in self.permutations.iter().enumerate() {
            let Some(pi) = pi else { continue };
            for (j, pj) in self.permutations.iter().enumerate().skip(i + 1) {
                let Some(pj) = pj else { continue };
                let exact = if pi == pj {
                    1.0
                } else if pi.iter().zip(pj).all(|(a, b)| a + b == n + 1) {
                    -1.0
                } else {
                    continue;
                };
                cross[(i, j)] = exact;
                cross[(j, i)] = exact;
            }
        }
        CorrelationMatrix::from_matrix(cross)
    }
}

pub(crate) fn rank_scores_from_ranks(ranks: &[Vec<f64>], n: usize) -> RankScores {
    let table = score_table(n);
    let normaliser = table.iter().map(|s| s * s).sum::<f64>();
    let d = ranks.len();
    let mut scores = DMatrix::zeros(n, d);
    for (j, col) in ranks.iter().enumerate() {
        for (i, &r) in col.iter().enumerate() {
            scores[(i, j)] = score_for_rank(r, &table);
        }
    }
    let permutations = ranks
        .iter()
        .map(|col| col.iter().map(|&r| (r.fract() == 0.0).then_some(r as usize)).collect())
        .collect();
    RankScores { scores, normaliser, permutations }
}

pub fn gaussian_rank_correlation(batch: &StatisticBatch) -> CorrelationMatrix {
    let ranks: Vec<Vec<f64>> = (0..batch.d()).map(|j| midranks(batch.column(j))).collect();
    rank_scores_from_ranks(&ranks, batch.n()).correlation()
}
