//! Xie-Beni validity index and label-aligned accuracy scoring.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::engine::MembershipMatrix;
use crate::error::{Error, Result};
use crate::linalg::{sq_euclidean, DataMatrix};

/// Compactness over separation:
/// `sum_i sum_k u_ik^2 |x_k - V_i|^2 / (N min_{i != j} |V_i - V_j|^2)`.
/// Lower is better. Coincident prototypes give `+inf`.
pub fn xie_beni(x: &DataMatrix, u: &MembershipMatrix, prototypes: &[Vec<f64>]) -> Result<f64> {
    let c = prototypes.len();
    if c < 2 {
        return Err(Error::TooFewClusters(c));
    }
    if u.clusters() != c || u.points() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: c * x.rows(),
            found: u.clusters() * u.points(),
        });
    }
    if let Some(v) = prototypes.iter().find(|v| v.len() != x.cols()) {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            found: v.len(),
        });
    }
    let mut compact = 0.0;
    for (mu, v) in u.iter_rows().zip(prototypes) {
        for (row, &uik) in x.iter_rows().zip(mu) {
            compact += uik * uik * sq_euclidean(row, v);
        }
    }
    let mut min_sep = f64::INFINITY;
    for i in 0..c {
        for j in (i + 1)..c {
            min_sep = min_sep.min(sq_euclidean(&prototypes[i], &prototypes[j]));
        }
    }
    if min_sep == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(compact / (x.rows() as f64 * min_sep))
}

/// Square table of counts: row `t` is true class `t`, column `t` is the
/// cluster aligned with it. Padded with empty rows or columns when the
/// number of clusters and classes differ.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: Vec<Vec<usize>>,
    /// `cluster_for_column[t]` is the predicted cluster shown in column `t`,
    /// `None` for padding.
    pub cluster_for_column: Vec<Option<usize>>,
}

impl ConfusionMatrix {
    pub fn size(&self) -> usize {
        self.counts.len()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().flatten().sum()
    }

    pub fn diagonal(&self) -> usize {
        (0..self.size()).map(|t| self.counts[t][t]).sum()
    }

    pub fn row_sums(&self) -> Vec<usize> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    pub fn column_sums(&self) -> Vec<usize> {
        (0..self.size())
            .map(|j| self.counts.iter().map(|r| r[j]).sum())
            .collect()
    }
}

fn compress<T: Ord + Copy>(labels: &[T]) -> (Vec<usize>, Vec<T>) {
    let mut index = BTreeMap::new();
    for &l in labels {
        index.entry(l).or_insert(0usize);
    }
    let order: Vec<T> = index.keys().copied().collect();
    for (i, v) in index.values_mut().enumerate() {
        *v = i;
    }
    (labels.iter().map(|l| index[l]).collect(), order)
}

/// Aligns predicted clusters to true classes so that the matched counts
/// are maximal, and returns the aligned confusion matrix with the
/// accuracy `diagonal / N`.
///
/// Label values are ranked in sorted order; class `t` is the `t`-th
/// smallest true label.
pub fn align_and_score(predicted: &[usize], truth: &[usize]) -> Result<(ConfusionMatrix, f64)> {
    if predicted.len() != truth.len() {
        return Err(Error::LabelMismatch {
            predicted: predicted.len(),
            truth: truth.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::param("cannot score an empty labeling"));
    }
    let (pred, pred_values) = compress(predicted);
    let (true_idx, true_values) = compress(truth);
    let k = pred_values.len().max(true_values.len());

    let mut raw = vec![vec![0usize; k]; k];
    for (&p, &t) in pred.iter().zip(&true_idx) {
        raw[t][p] += 1;
    }
    let assignment = max_assignment(&raw);

    let counts = (0..k)
        .map(|t| (0..k).map(|col| raw[t][assignment[col]]).collect())
        .collect();
    let cluster_for_column = (0..k)
        .map(|col| pred_values.get(assignment[col]).copied())
        .collect();
    let cm = ConfusionMatrix {
        counts,
        cluster_for_column,
    };
    let accuracy = cm.diagonal() as f64 / predicted.len() as f64;
    Ok((cm, accuracy))
}

/// Hungarian algorithm on a square profit table; returns, for each row,
/// the column assigned to it.
fn max_assignment(profit: &[Vec<usize>]) -> Vec<usize> {
    let n = profit.len();
    let top = profit.iter().flatten().copied().max().unwrap_or(0) as i64;
    // 1-based potentials formulation, minimizing top - profit
    let cost = |i: usize, j: usize| top - profit[i - 1][j - 1] as i64;
    let mut u = vec![0i64; n + 1];
    let mut v = vec![0i64; n + 1];
    let mut owner = vec![0usize; n + 1];
    let mut way = vec![0usize; n + 1];
    for i in 1..=n {
        owner[0] = i;
        let mut j0 = 0;
        let mut minv = vec![i64::MAX; n + 1];
        let mut used = vec![false; n + 1];
        loop {
            used[j0] = true;
            let i0 = owner[j0];
            let mut delta = i64::MAX;
            let mut j1 = 0;
            for j in 1..=n {
                if !used[j] {
                    let cur = cost(i0, j) - u[i0] - v[j];
                    if cur < minv[j] {
                        minv[j] = cur;
                        way[j] = j0;
                    }
                    if minv[j] < delta {
                        delta = minv[j];
                        j1 = j;
                    }
                }
            }
            for j in 0..=n {
                if used[j] {
                    u[owner[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
            if owner[j0] == 0 {
                break;
            }
        }
        loop {
            let j1 = way[j0];
            owner[j0] = owner[j1];
            j0 = j1;
            if j0 == 0 {
                break;
            }
        }
    }
    let mut assignment = vec![0; n];
    for j in 1..=n {
        assignment[owner[j] - 1] = j - 1;
    }
    assignment
}
