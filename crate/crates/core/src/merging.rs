//! Similarity-driven cluster merging.
//!
//! Two fuzzy clusters are compared through
//! `FR_ij = (dp_i + dp_j) / |V_i - V_j|`, the ratio of their summed fuzzy
//! dispersions to the distance between their prototypes. `FR_ij < 1` means
//! the dispersion spheres do not touch. Pairs above an annealed threshold
//! between `tau1` and `tau2` are merged, greediest first, at most once per
//! cluster per pass.

use serde::{Deserialize, Serialize};

use crate::engine::{ClusterAxes, MembershipMatrix};
use crate::error::{Error, Result};
use crate::linalg::{sq_euclidean, DataMatrix};

/// How the membership-weighted squared radii are averaged.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DispersionNorm {
    /// Divide by `sum_k u_ik^m`: a weighted mean of squared distances.
    #[default]
    WeightSum,
    /// Divide by the fuzzy cardinality `sum_k u_ik`.
    FuzzyCardinality,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MergePolicy {
    /// Pairs below this similarity are never merged.
    pub tau1: f64,
    /// Pairs above this similarity are always merged.
    pub tau2: f64,
    /// Geometric decay of the effective threshold per annealing step.
    pub anneal_decay: f64,
    pub max_outer_iters: usize,
    pub dispersion: DispersionNorm,
}

impl Default for MergePolicy {
    fn default() -> Self {
        Self {
            tau1: 1.0,
            tau2: 2.0,
            anneal_decay: 0.9,
            max_outer_iters: 100,
            dispersion: DispersionNorm::default(),
        }
    }
}

impl MergePolicy {
    pub fn validate(&self) -> Result<()> {
        if !(self.tau1 > 0.0 && self.tau1 <= self.tau2) || !self.tau2.is_finite() {
            return Err(Error::param(format!(
                "thresholds must satisfy 0 < tau1 <= tau2, got tau1 = {}, tau2 = {}",
                self.tau1, self.tau2
            )));
        }
        if !(self.anneal_decay > 0.0 && self.anneal_decay < 1.0) {
            return Err(Error::param(format!(
                "anneal_decay must lie in (0, 1), got {}",
                self.anneal_decay
            )));
        }
        if self.max_outer_iters == 0 {
            return Err(Error::param("max_outer_iters must be positive"));
        }
        Ok(())
    }

    /// `max(tau1, tau2 * decay^t)`.
    pub fn threshold(&self, t: usize) -> f64 {
        let exp = i32::try_from(t).unwrap_or(i32::MAX);
        (self.tau2 * self.anneal_decay.powi(exp)).max(self.tau1)
    }
}

/// Prototypes, principal axes and fuzzy dispersions of a partition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClusterModel {
    pub prototypes: Vec<Vec<f64>>,
    pub axes: Vec<ClusterAxes>,
    pub dispersions: Vec<f64>,
}

impl ClusterModel {
    pub fn clusters(&self) -> usize {
        self.prototypes.len()
    }

    pub fn ranks(&self) -> Vec<usize> {
        self.axes.iter().map(ClusterAxes::rank).collect()
    }
}

/// Membership-weighted RMS radius of cluster `i` around its prototype.
pub fn fuzzy_dispersion(
    x: &DataMatrix,
    mu: &[f64],
    v: &[f64],
    m: f64,
    norm: DispersionNorm,
) -> Result<f64> {
    if mu.len() != x.rows() {
        return Err(Error::DimensionMismatch {
            expected: x.rows(),
            found: mu.len(),
        });
    }
    if v.len() != x.cols() {
        return Err(Error::DimensionMismatch {
            expected: x.cols(),
            found: v.len(),
        });
    }
    let mut spread = 0.0;
    let mut weight = 0.0;
    let mut card = 0.0;
    for (row, &u) in x.iter_rows().zip(mu) {
        card += u;
        if u == 0.0 {
            continue;
        }
        let w = u.powf(m);
        weight += w;
        spread += w * sq_euclidean(row, v);
    }
    let denom = match norm {
        DispersionNorm::WeightSum => weight,
        DispersionNorm::FuzzyCardinality => card,
    };
    if !(denom > 0.0) {
        return Err(Error::param(
            "fuzzy dispersion of a cluster with no members",
        ));
    }
    Ok((spread / denom).sqrt())
}

/// Euclidean distance between two prototypes.
pub fn dissimilarity(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(sq_euclidean(a, b).sqrt())
}

pub fn cluster_dispersions(
    x: &DataMatrix,
    u: &MembershipMatrix,
    prototypes: &[Vec<f64>],
    m: f64,
    norm: DispersionNorm,
) -> Result<Vec<f64>> {
    if u.clusters() != prototypes.len() {
        return Err(Error::DimensionMismatch {
            expected: u.clusters(),
            found: prototypes.len(),
        });
    }
    u.iter_rows()
        .zip(prototypes)
        .map(|(mu, v)| fuzzy_dispersion(x, mu, v, m, norm))
        .collect()
}

/// Symmetric c x c similarity table; the diagonal is zero.
#[derive(Debug, Clone, PartialEq)]
pub struct SimilarityMatrix {
    size: usize,
    values: Vec<f64>,
}

impl SimilarityMatrix {
    /// `FR_ij = (dp_i + dp_j) / dv_ij`, or `+inf` for coincident prototypes.
    pub fn from_parts(dispersions: &[f64], prototypes: &[Vec<f64>]) -> Result<Self> {
        let c = prototypes.len();
        if c < 2 {
            return Err(Error::TooFewClusters(c));
        }
        if dispersions.len() != c {
            return Err(Error::DimensionMismatch {
                expected: c,
                found: dispersions.len(),
            });
        }
        let mut values = vec![0.0; c * c];
        for i in 0..c {
            for j in (i + 1)..c {
                let dv = dissimilarity(&prototypes[i], &prototypes[j])?;
                let fr = if dv == 0.0 {
                    f64::INFINITY
                } else {
                    (dispersions[i] + dispersions[j]) / dv
                };
                values[i * c + j] = fr;
                values[j * c + i] = fr;
            }
        }
        Ok(Self { size: c, values })
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.size + j]
    }

    pub fn max_off_diagonal(&self) -> f64 {
        let c = self.size;
        (0..c)
            .flat_map(|i| ((i + 1)..c).map(move |j| (i, j)))
            .map(|(i, j)| self.get(i, j))
            .fold(0.0, f64::max)
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.size).map(<[f64]>::to_vec).collect()
    }
}

pub fn similarity_matrix(
    model: &ClusterModel,
    x: &DataMatrix,
    u: &MembershipMatrix,
    m: f64,
    norm: DispersionNorm,
) -> Result<SimilarityMatrix> {
    if model.clusters() < 2 {
        return Err(Error::TooFewClusters(model.clusters()));
    }
    let dp = cluster_dispersions(x, u, &model.prototypes, m, norm)?;
    SimilarityMatrix::from_parts(&dp, &model.prototypes)
}

/// `DB_FR = (1/c) sum_i max_{j != i} FR_ij`.
pub fn fuzzy_db_index(fr: &SimilarityMatrix) -> Result<f64> {
    let c = fr.size();
    if c < 2 {
        return Err(Error::TooFewClusters(c));
    }
    let total: f64 = (0..c)
        .map(|i| {
            (0..c)
                .filter(|&j| j != i)
                .map(|j| fr.get(i, j))
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum();
    Ok(total / c as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MergeEvent {
    /// Outer iteration of the merge.
    pub iteration: usize,
    /// Cluster labels before the merge; `pair.0 < pair.1`.
    pub pair: (usize, usize),
    #[serde(with = "crate::report::float_ext")]
    pub fr_value: f64,
    pub new_prototype: Vec<f64>,
    pub threshold_used: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MergeOutcome {
    pub model: ClusterModel,
    pub memberships: MembershipMatrix,
    pub events: Vec<MergeEvent>,
}

/// Pairs to merge at `threshold`: highest similarity first, skipping any
/// pair that touches a cluster already taken in this pass.
pub fn select_merge_pairs(fr: &SimilarityMatrix, threshold: f64) -> Vec<(usize, usize)> {
    let c = fr.size();
    let mut candidates: Vec<(usize, usize)> = (0..c)
        .flat_map(|i| ((i + 1)..c).map(move |j| (i, j)))
        .filter(|&(i, j)| fr.get(i, j) > threshold)
        .collect();
    candidates.sort_by(|a, b| fr.get(b.0, b.1).total_cmp(&fr.get(a.0, a.1)).then(a.cmp(b)));
    let mut taken = vec![false; c];
    let mut out = Vec::new();
    for (i, j) in candidates {
        if !taken[i] && !taken[j] {
            taken[i] = true;
            taken[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// One merging pass at annealing step `t`.
///
/// The merged cluster takes the lower label, its membership row is the sum
/// of both rows and its prototype the midpoint of both prototypes; the
/// higher label is removed. The similarity table is not recomputed within
/// the pass.
pub fn merge_pass(
    x: &DataMatrix,
    model: &ClusterModel,
    u: &MembershipMatrix,
    fr: &SimilarityMatrix,
    policy: &MergePolicy,
    m: f64,
    t: usize,
) -> Result<MergeOutcome> {
    let c = model.clusters();
    if u.clusters() != c || fr.size() != c {
        return Err(Error::DimensionMismatch {
            expected: c,
            found: if u.clusters() != c {
                u.clusters()
            } else {
                fr.size()
            },
        });
    }
    let threshold = policy.threshold(t);
    let pairs = select_merge_pairs(fr, threshold);
    if pairs.is_empty() {
        return Ok(MergeOutcome {
            model: model.clone(),
            memberships: u.clone(),
            events: Vec::new(),
        });
    }

    let mut partner: Vec<Option<usize>> = vec![None; c];
    let mut events = Vec::with_capacity(pairs.len());
    for &(i, j) in &pairs {
        partner[i] = Some(j);
        partner[j] = Some(i);
        let mid: Vec<f64> = model.prototypes[i]
            .iter()
            .zip(&model.prototypes[j])
            .map(|(a, b)| 0.5 * (a + b))
            .collect();
        events.push(MergeEvent {
            iteration: t,
            pair: (i, j),
            fr_value: fr.get(i, j),
            new_prototype: mid,
            threshold_used: threshold,
        });
    }

    let n = u.points();
    let mut rows = Vec::with_capacity((c - pairs.len()) * n);
    let mut prototypes = Vec::with_capacity(c - pairs.len());
    let mut axes = Vec::with_capacity(c - pairs.len());
    for (i, &other) in partner.iter().enumerate() {
        match other {
            Some(j) if j < i => continue,
            Some(j) => {
                // Clamp the round-off of summing two memberships.
                rows.extend(u.row(i).iter().zip(u.row(j)).map(|(a, b)| (a + b).min(1.0)));
                let ev = events
                    .iter()
                    .find(|e| e.pair == (i, j))
                    .expect("event for pair");
                prototypes.push(ev.new_prototype.clone());
                axes.push(ClusterAxes::default());
            }
            None => {
                rows.extend_from_slice(u.row(i));
                prototypes.push(model.prototypes[i].clone());
                axes.push(model.axes[i].clone());
            }
        }
    }
    let memberships = MembershipMatrix::from_raw(prototypes.len(), n, rows);
    let dispersions = cluster_dispersions(x, &memberships, &prototypes, m, policy.dispersion)?;
    Ok(MergeOutcome {
        model: ClusterModel {
            prototypes,
            axes,
            dispersions,
        },
        memberships,
        events,
    })
}
