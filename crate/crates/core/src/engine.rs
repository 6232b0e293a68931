//! Generalized fuzzy c-prototype objective and its alternating optimization.
//!
//! The dissimilarity of point `x` to cluster `i` is
//!
//! ```text
//! D(x, i) = |x - V_i|_p^p  -  g * sum_s (s_is . (x - V_i))^2
//! ```
//!
//! where `s_i1..s_ir` are the leading eigenvectors of the cluster's fuzzy
//! scatter matrix. With orthonormal axes and `g` in `[0, 1]` the p = 2 form
//! is bounded below by `(1 - g) |x - V_i|^2`, so it stays a valid
//! dissimilarity; offsets along a cluster's principal directions are
//! discounted.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{dot, pnorm_unchecked, sym_eig, DataMatrix, SymmetricMatrix};
use crate::rank::{select_rank, Spectrum};

/// Column sums of a membership matrix must equal one within this bound.
pub const COLUMN_SUM_TOL: f64 = 1e-9;

/// c x N fuzzy partition, row-major (row `i` = memberships of cluster `i`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MembershipMatrix {
    clusters: usize,
    points: usize,
    values: Vec<f64>,
}

impl MembershipMatrix {
    /// Wraps raw values after checking the partition constraints.
    pub fn new(clusters: usize, points: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != clusters * points {
            return Err(Error::DimensionMismatch {
                expected: clusters * points,
                found: values.len(),
            });
        }
        let u = Self {
            clusters,
            points,
            values,
        };
        u.validate()?;
        Ok(u)
    }

    pub(crate) fn from_raw(clusters: usize, points: usize, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), clusters * points);
        Self {
            clusters,
            points,
            values,
        }
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let points = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != points) {
            return Err(Error::param("membership rows have unequal lengths"));
        }
        Self::new(rows.len(), points, rows.concat())
    }

    /// Uniform random entries in (0, 1), each column normalized to sum one.
    pub fn random<R: Rng + ?Sized>(clusters: usize, points: usize, rng: &mut R) -> Result<Self> {
        if clusters == 0 || points == 0 {
            return Err(Error::param("random partition needs c >= 1 and N >= 1"));
        }
        let mut values = vec![0.0; clusters * points];
        for v in &mut values {
            // open interval: reject exact zeros
            let mut x: f64 = rng.random();
            while x == 0.0 {
                x = rng.random();
            }
            *v = x;
        }
        for k in 0..points {
            let s: f64 = (0..clusters).map(|i| values[i * points + k]).sum();
            for i in 0..clusters {
                values[i * points + k] /= s;
            }
        }
        Ok(Self::from_raw(clusters, points, values))
    }

    pub fn clusters(&self) -> usize {
        self.clusters
    }

    pub fn points(&self) -> usize {
        self.points
    }

    pub fn get(&self, i: usize, k: usize) -> f64 {
        self.values[i * self.points + k]
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.values[i * self.points..(i + 1) * self.points]
    }

    pub fn iter_rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.values
            .chunks_exact(self.points.max(1))
            .take(self.clusters)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn column_sum(&self, k: usize) -> f64 {
        (0..self.clusters).map(|i| self.get(i, k)).sum()
    }

    /// Fuzzy cardinality of cluster `i`: the sum of its memberships.
    pub fn cardinality(&self, i: usize) -> f64 {
        self.row(i).iter().sum()
    }

    /// Largest absolute entrywise difference.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// Hard labels by largest membership; ties go to the lowest index.
    pub fn argmax_labels(&self) -> Vec<usize> {
        (0..self.points)
            .map(|k| {
                let mut best = 0;
                for i in 1..self.clusters {
                    if self.get(i, k) > self.get(best, k) {
                        best = i;
                    }
                }
                best
            })
            .collect()
    }

    /// Checks `0 <= u <= 1`, unit column sums and non-empty clusters. With
    /// two or more clusters no cluster may hold every point outright.
    pub fn validate(&self) -> Result<()> {
        if self.clusters == 0 || self.points == 0 {
            return Err(Error::ConstraintViolation("empty membership matrix".into()));
        }
        if let Some(pos) = self.values.iter().position(|&u| !(0.0..=1.0).contains(&u)) {
            return Err(Error::ConstraintViolation(format!(
                "membership of cluster {} for point {} is {}",
                pos / self.points,
                pos % self.points,
                self.values[pos]
            )));
        }
        for k in 0..self.points {
            let s = self.column_sum(k);
            if (s - 1.0).abs() > COLUMN_SUM_TOL {
                return Err(Error::ConstraintViolation(format!(
                    "memberships of point {k} sum to {s}"
                )));
            }
        }
        let n = self.points as f64;
        for i in 0..self.clusters {
            let s = self.cardinality(i);
            if s <= 0.0 || (self.clusters > 1 && s >= n) {
                return Err(Error::ConstraintViolation(format!(
                    "cluster {i} has total membership {s} (N = {n})"
                )));
            }
        }
        Ok(())
    }
}

/// Principal directions of one cluster (may be empty).
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ClusterAxes {
    pub directions: Vec<Vec<f64>>,
}

impl ClusterAxes {
    pub fn rank(&self) -> usize {
        self.directions.len()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EngineConfig {
    /// Fuzziness exponent, > 1.
    pub m: f64,
    /// Norm order; fitting supports p = 2 only.
    pub p: f64,
    /// Weight of the principal-axis term, in [0, 1].
    pub g: f64,
    /// Stop once the largest membership change drops below this.
    pub epsilon: f64,
    pub max_iters: usize,
    /// Smallest admissible number of principal axes.
    pub r1: usize,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self {
            m: 2.0,
            p: 2.0,
            g: DEFAULT_G,
            epsilon: 1e-3,
            max_iters: 300,
            r1: 1,
        }
    }
}

/// Default principal-axis weight.
pub const DEFAULT_G: f64 = 0.5;

impl EngineConfig {
    /// Plain fuzzy c-means: no principal-axis term.
    pub fn fcm() -> Self {
        Self {
            g: 0.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.m > 1.0) || !self.m.is_finite() {
            return Err(Error::param(format!(
                "fuzziness m must be > 1, got {}",
                self.m
            )));
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(Error::param(format!(
                "norm order p must be >= 1, got {}",
                self.p
            )));
        }
        if !(0.0..=1.0).contains(&self.g) {
            return Err(Error::param(format!(
                "weight g must lie in [0, 1], got {}",
                self.g
            )));
        }
        if !(self.epsilon > 0.0) {
            return Err(Error::param(format!(
                "epsilon must be > 0, got {}",
                self.epsilon
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::param("max_iters must be positive"));
        }
        if self.r1 == 0 {
            return Err(Error::param("minimum rank r1 must be >= 1"));
        }
        Ok(())
    }

    fn validate_for_fit(&self) -> Result<()> {
        self.validate()?;
        if self.p != 2.0 {
            return Err(Error::param(format!(
                "prototype updates are only available for p = 2, got p = {}",
                self.p
            )));
        }
        Ok(())
    }
}

fn check_dims(expected: usize, found: usize) -> Result<()> {
    if expected != found {
        return Err(Error::DimensionMismatch { expected, found });
    }
    Ok(())
}

/// `E_i = sum_k u_ik^m (x_k - V_i)(x_k - V_i)^T`.
pub fn scatter_matrix(x: &DataMatrix, mu: &[f64], v: &[f64], m: f64) -> Result<SymmetricMatrix> {
    check_dims(x.rows(), mu.len())?;
    check_dims(x.cols(), v.len())?;
    let n = x.cols();
    let mut e = SymmetricMatrix::zeros(n);
    let mut diff = vec![0.0; n];
    for (row, &u) in x.iter_rows().zip(mu) {
        let w = u.powf(m);
        if w == 0.0 {
            continue;
        }
        for ((d, a), b) in diff.iter_mut().zip(row).zip(v) {
            *d = a - b;
        }
        e.add_outer(w, &diff);
    }
    e.mirror_upper();
    Ok(e)
}

/// Point-to-cluster dissimilarity; see the module docs. Negative round-off
/// is clamped to zero.
pub fn composite_distance(x: &[f64], v: &[f64], axes: &ClusterAxes, p: f64, g: f64) -> Result<f64> {
    check_dims(x.len(), v.len())?;
    if let Some(s) = axes.directions.iter().find(|s| s.len() != x.len()) {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: s.len(),
        });
    }
    if !(p >= 1.0) {
        return Err(Error::param(format!("norm order p must be >= 1, got {p}")));
    }
    if !(0.0..=1.0).contains(&g) {
        return Err(Error::param(format!(
            "weight g must lie in [0, 1], got {g}"
        )));
    }
    let mut diff = vec![0.0; x.len()];
    Ok(distance_with(x, v, axes, p, g, &mut diff))
}

fn distance_with(
    x: &[f64],
    v: &[f64],
    axes: &ClusterAxes,
    p: f64,
    g: f64,
    diff: &mut [f64],
) -> f64 {
    let base = pnorm_unchecked(x, v, p);
    if g == 0.0 || axes.directions.is_empty() {
        return base;
    }
    for ((d, a), b) in diff.iter_mut().zip(x).zip(v) {
        *d = a - b;
    }
    let along: f64 = axes
        .directions
        .iter()
        .map(|s| {
            let t = dot(s, diff);
            t * t
        })
        .sum();
    (base - g * along).max(0.0)
}

/// c x N table of composite distances.
pub fn distance_table(
    x: &DataMatrix,
    prototypes: &[Vec<f64>],
    axes: &[ClusterAxes],
    p: f64,
    g: f64,
) -> Result<Vec<f64>> {
    check_dims(prototypes.len(), axes.len())?;
    let n = x.cols();
    for (v, s) in prototypes.iter().zip(axes) {
        check_dims(n, v.len())?;
        if let Some(dir) = s.directions.iter().find(|d| d.len() != n) {
            check_dims(n, dir.len())?;
        }
    }
    let mut diff = vec![0.0; n];
    let mut out = Vec::with_capacity(prototypes.len() * x.rows());
    for (v, s) in prototypes.iter().zip(axes) {
        for row in x.iter_rows() {
            out.push(distance_with(row, v, s, p, g, &mut diff));
        }
    }
    Ok(out)
}

/// `J = sum_i sum_k u_ik^m D(x_k, i)`.
pub fn objective_value(
    x: &DataMatrix,
    u: &MembershipMatrix,
    prototypes: &[Vec<f64>],
    axes: &[ClusterAxes],
    config: &EngineConfig,
) -> Result<f64> {
    u.validate()?;
    check_dims(x.rows(), u.points())?;
    check_dims(u.clusters(), prototypes.len())?;
    let d = distance_table(x, prototypes, axes, config.p, config.g)?;
    Ok(weighted_sum(u, &d, config.m))
}

fn weighted_sum(u: &MembershipMatrix, d: &[f64], m: f64) -> f64 {
    u.values()
        .iter()
        .zip(d)
        .map(|(&mu, &dist)| if mu == 0.0 { 0.0 } else { mu.powf(m) * dist })
        .sum()
}

fn memberships_from_table(d: &[f64], clusters: usize, points: usize, m: f64) -> MembershipMatrix {
    let exponent = 1.0 / (m - 1.0);
    let mut values = vec![0.0; clusters * points];
    let mut inv = vec![0.0; clusters];
    for k in 0..points {
        let zeros = (0..clusters).filter(|&i| d[i * points + k] == 0.0).count();
        if zeros > 0 {
            let share = 1.0 / zeros as f64;
            for i in 0..clusters {
                if d[i * points + k] == 0.0 {
                    values[i * points + k] = share;
                }
            }
            continue;
        }
        // normalize by the smallest distance to keep the powers in range
        let dmin = (0..clusters)
            .map(|i| d[i * points + k])
            .fold(f64::INFINITY, f64::min);
        let mut total = 0.0;
        for i in 0..clusters {
            inv[i] = (dmin / d[i * points + k]).powf(exponent);
            total += inv[i];
        }
        for i in 0..clusters {
            values[i * points + k] = inv[i] / total;
        }
    }
    MembershipMatrix::from_raw(clusters, points, values)
}

/// `u_ik = 1 / sum_j (D_ik / D_jk)^(1/(m-1))`. Points lying exactly on one
/// or more prototypes are shared equally among those clusters.
pub fn update_memberships(
    x: &DataMatrix,
    prototypes: &[Vec<f64>],
    axes: &[ClusterAxes],
    config: &EngineConfig,
) -> Result<MembershipMatrix> {
    if prototypes.is_empty() {
        return Err(Error::param(
            "cannot update memberships with zero prototypes",
        ));
    }
    config.validate()?;
    let d = distance_table(x, prototypes, axes, config.p, config.g)?;
    Ok(memberships_from_table(
        &d,
        prototypes.len(),
        x.rows(),
        config.m,
    ))
}

/// Membership-weighted means `V_i = sum_k u_ik^m x_k / sum_k u_ik^m`.
///
/// For p = 2 this is also the stationary point with the axis term present:
/// the gradient is `(I - g S S^T) sum_k u_ik^m (x_k - V_i)` and the matrix
/// factor is positive semi-definite for `g <= 1`.
pub fn update_prototypes(
    x: &DataMatrix,
    u: &MembershipMatrix,
    config: &EngineConfig,
) -> Result<Vec<Vec<f64>>> {
    check_dims(x.rows(), u.points())?;
    if config.p != 2.0 {
        return Err(Error::param(
            "prototype updates are only available for p = 2",
        ));
    }
    let n = x.cols();
    let mut out = Vec::with_capacity(u.clusters());
    for (i, mu) in u.iter_rows().enumerate() {
        let mut acc = vec![0.0; n];
        let mut total = 0.0;
        for (row, &uik) in x.iter_rows().zip(mu) {
            if uik == 0.0 {
                continue;
            }
            let w = uik.powf(config.m);
            total += w;
            for (a, b) in acc.iter_mut().zip(row) {
                *a += w * b;
            }
        }
        if !(total > 0.0) {
            return Err(Error::EmptyCluster { cluster: i });
        }
        acc.iter_mut().for_each(|a| *a /= total);
        out.push(acc);
    }
    Ok(out)
}

/// Leading eigenvectors of `E_i`, with their count chosen by MDL on the
/// scatter spectrum. The MDL sample count is the cluster's fuzzy
/// cardinality rounded to the nearest integer, at least 2.
pub fn principal_axes(
    x: &DataMatrix,
    mu: &[f64],
    v: &[f64],
    config: &EngineConfig,
) -> Result<ClusterAxes> {
    let n = x.cols();
    if n < 2 {
        return Ok(ClusterAxes::default());
    }
    let e = scatter_matrix(x, mu, v, config.m)?;
    let eig = sym_eig(&e)?;
    let samples = mu.iter().sum::<f64>().round().max(2.0);
    let spectrum = Spectrum::new(eig.eigenvalues.clone(), samples)?;
    let r = select_rank(&spectrum, config.r1.min(n - 1))?;
    Ok(ClusterAxes {
        directions: eig.eigenvectors.into_iter().take(r).collect(),
    })
}

/// Converged state of one alternating-optimization run.
#[derive(Debug, Clone, PartialEq)]
pub struct FitResult {
    pub memberships: MembershipMatrix,
    pub prototypes: Vec<Vec<f64>>,
    pub axes: Vec<ClusterAxes>,
    /// Objective after each iteration.
    pub objective: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl FitResult {
    pub fn ranks(&self) -> Vec<usize> {
        self.axes.iter().map(ClusterAxes::rank).collect()
    }
}

/// Alternating optimization from an initial partition.
///
/// Each iteration (a) recomputes prototypes from the memberships, (b)
/// refreshes every cluster's principal axes from its scatter matrix (skipped
/// when `g = 0`), and (c) recomputes memberships. Iteration stops when the
/// largest entrywise membership change drops below `epsilon` or after
/// `max_iters` iterations.
pub fn gfc_fit(x: &DataMatrix, u0: &MembershipMatrix, config: &EngineConfig) -> Result<FitResult> {
    config.validate_for_fit()?;
    u0.validate()?;
    check_dims(x.rows(), u0.points())?;
    let c = u0.clusters();
    let mut u = u0.clone();
    let mut objective = Vec::new();
    let mut axes = vec![ClusterAxes::default(); c];

    for iter in 1..=config.max_iters {
        let prototypes = update_prototypes(x, &u, config).map_err(|e| match e {
            Error::EmptyCluster { cluster } => Error::DegenerateCluster {
                cluster,
                iteration: iter,
            },
            other => other,
        })?;
        if config.g > 0.0 {
            for (i, v) in prototypes.iter().enumerate() {
                axes[i] = principal_axes(x, u.row(i), v, config)?;
            }
        }
        let d = distance_table(x, &prototypes, &axes, config.p, config.g)?;
        let next = memberships_from_table(&d, c, x.rows(), config.m);
        objective.push(weighted_sum(&next, &d, config.m));
        let delta = next.max_abs_diff(&u);
        u = next;
        let converged = delta < config.epsilon;
        if converged || iter == config.max_iters {
            return Ok(FitResult {
                memberships: u,
                prototypes,
                axes,
                objective,
                iterations: iter,
                converged,
            });
        }
    }
    unreachable!("max_iters is validated to be positive")
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn data(rows: &[Vec<f64>]) -> DataMatrix {
        DataMatrix::from_rows(rows).unwrap()
    }

    #[test]
    fn scatter_examples() {
        let x = data(&[vec![0.0, 0.0], vec![2.0, 0.0]]);
        let e = scatter_matrix(&x, &[1.0, 1.0], &[1.0, 0.0], 2.0).unwrap();
        assert_eq!(e.values(), &[2.0, 0.0, 0.0, 0.0]);

        let same = data(&[vec![1.0, 1.0], vec![1.0, 1.0]]);
        let z = scatter_matrix(&same, &[0.3, 0.7], &[1.0, 1.0], 2.0).unwrap();
        assert!(z.values().iter().all(|&v| v == 0.0));

        let w = 2f64.powf(0.5);
        let doubled = scatter_matrix(&x, &[w, w], &[1.0, 0.0], 2.0).unwrap();
        assert!((doubled.get(0, 0) - 4.0).abs() < 1e-12);

        assert!(scatter_matrix(&x, &[1.0], &[1.0, 0.0], 2.0).is_err());
        assert!(scatter_matrix(&x, &[1.0, 1.0], &[1.0], 2.0).is_err());
    }

    #[test]
    fn composite_examples() {
        let axes = ClusterAxes {
            directions: vec![vec![1.0, 0.0]],
        };
        // |d|^2 - g (s.d)^2 = 4 - 0.5 * 4
        let d = composite_distance(&[3.0, 1.0], &[1.0, 1.0], &axes, 2.0, 0.5).unwrap();
        assert_eq!(d, 2.0);
        // offset orthogonal to the axis is not discounted
        let d = composite_distance(&[1.0, 3.0], &[1.0, 1.0], &axes, 2.0, 0.5).unwrap();
        assert_eq!(d, 4.0);
        assert_eq!(
            composite_distance(&[1.0, 2.0], &[1.0, 2.0], &axes, 2.0, 0.7).unwrap(),
            0.0
        );
        let plain = composite_distance(&[0.3, -1.0], &[2.0, 5.0], &axes, 2.0, 0.0).unwrap();
        assert_eq!(
            plain,
            crate::linalg::pnorm_dist(&[0.3, -1.0], &[2.0, 5.0], 2.0).unwrap()
        );
        // g = 1 along the axis gives exactly zero, never negative
        assert_eq!(
            composite_distance(&[3.0, 1.0], &[1.0, 1.0], &axes, 2.0, 1.0).unwrap(),
            0.0
        );
    }

    #[test]
    fn composite_errors() {
        let axes = ClusterAxes {
            directions: vec![vec![1.0]],
        };
        assert!(composite_distance(&[1.0, 2.0], &[1.0, 2.0], &axes, 2.0, 0.5).is_err());
        assert!(
            composite_distance(&[1.0], &[1.0, 2.0], &ClusterAxes::default(), 2.0, 0.5).is_err()
        );
        assert!(composite_distance(&[1.0], &[1.0], &ClusterAxes::default(), 2.0, 1.5).is_err());
    }

    #[test]
    fn membership_examples() {
        let cfg = EngineConfig::fcm();
        let none = vec![ClusterAxes::default(); 2];
        // equidistant
        let x = data(&[vec![0.0]]);
        let u = update_memberships(&x, &[vec![-1.0], vec![1.0]], &none, &cfg).unwrap();
        assert_eq!(u.values(), &[0.5, 0.5]);
        // on a prototype
        let u = update_memberships(&x, &[vec![0.0], vec![1.0]], &none, &cfg).unwrap();
        assert_eq!(u.values(), &[1.0, 0.0]);
        // D = 1 and 3 with m = 2 -> 1 / (1 + 1/3)
        let u = update_memberships(&x, &[vec![1.0], vec![-(3f64.sqrt())]], &none, &cfg).unwrap();
        assert!((u.get(0, 0) - 0.75).abs() < 1e-12);
        assert!((u.get(1, 0) - 0.25).abs() < 1e-12);
        // two prototypes both on the point split it evenly
        let u = update_memberships(
            &x,
            &[vec![0.0], vec![0.0], vec![2.0]],
            &[
                ClusterAxes::default(),
                ClusterAxes::default(),
                ClusterAxes::default(),
            ],
            &cfg,
        )
        .unwrap();
        assert_eq!(u.values(), &[0.5, 0.5, 0.0]);
        assert!(update_memberships(&x, &[], &[], &cfg).is_err());
    }

    #[test]
    fn prototype_examples() {
        let cfg = EngineConfig::fcm();
        let x = data(&[vec![0.0], vec![2.0]]);
        let u = MembershipMatrix::from_raw(1, 2, vec![0.8, 0.2]);
        let v = update_prototypes(&x, &u, &cfg).unwrap();
        assert!((v[0][0] - 0.08 / 0.68).abs() < 1e-12);
        assert!((v[0][0] - 0.117_647_058_823_529_4).abs() < 1e-12);

        let x = data(&[vec![1.0, 5.0], vec![3.0, -1.0], vec![2.0, 2.0]]);
        let u = MembershipMatrix::from_raw(1, 3, vec![0.0, 1.0, 0.0]);
        assert_eq!(update_prototypes(&x, &u, &cfg).unwrap()[0], vec![3.0, -1.0]);
        let u = MembershipMatrix::from_raw(1, 3, vec![0.4, 0.4, 0.4]);
        let v = update_prototypes(&x, &u, &cfg).unwrap();
        assert!((v[0][0] - 2.0).abs() < 1e-12 && (v[0][1] - 2.0).abs() < 1e-12);

        let empty = MembershipMatrix::from_raw(2, 3, vec![1.0, 1.0, 1.0, 0.0, 0.0, 0.0]);
        assert!(matches!(
            update_prototypes(&x, &empty, &cfg),
            Err(Error::EmptyCluster { cluster: 1 })
        ));
    }

    #[test]
    fn objective_examples() {
        let cfg = EngineConfig::default();
        let x = data(&[vec![1.0, 2.0]]);
        let u = MembershipMatrix::new(1, 1, vec![1.0]).unwrap();
        let j =
            objective_value(&x, &u, &[vec![1.0, 2.0]], &[ClusterAxes::default()], &cfg).unwrap();
        assert_eq!(j, 0.0);

        // uniform memberships factor out as 0.5^2
        let x = data(&[vec![0.0], vec![1.0], vec![4.0]]);
        let u = MembershipMatrix::new(2, 3, vec![0.5; 6]).unwrap();
        let v = vec![vec![0.0], vec![2.0]];
        let none = vec![ClusterAxes::default(); 2];
        let j = objective_value(&x, &u, &v, &none, &cfg).unwrap();
        let total: f64 = [0.0, 1.0, 16.0, 4.0, 1.0, 4.0].iter().sum();
        assert!((j - 0.25 * total).abs() < 1e-12);

        let bad = MembershipMatrix::from_raw(2, 3, vec![0.5, 0.5, 0.5, 0.6, 0.5, 0.5]);
        assert!(matches!(
            objective_value(&x, &bad, &v, &none, &cfg),
            Err(Error::ConstraintViolation(_))
        ));
    }

    #[test]
    fn membership_validation() {
        assert!(MembershipMatrix::new(2, 2, vec![0.5, 1.2, 0.5, -0.2]).is_err());
        assert!(MembershipMatrix::new(2, 2, vec![0.5, 0.5, 0.4, 0.5]).is_err());
        // a cluster owning all points outright
        assert!(MembershipMatrix::new(2, 2, vec![1.0, 1.0, 0.0, 0.0]).is_err());
        // ...which is fine for a single cluster
        assert!(MembershipMatrix::new(1, 2, vec![1.0, 1.0]).is_ok());
        assert!(MembershipMatrix::new(2, 2, vec![1.0]).is_err());
    }

    #[test]
    fn random_partition_is_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let u = MembershipMatrix::random(5, 40, &mut rng).unwrap();
        u.validate().unwrap();
        for k in 0..40 {
            assert!((u.column_sum(k) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn config_validation() {
        assert!(EngineConfig::default().validate().is_ok());
        for bad in [
            EngineConfig {
                m: 1.0,
                ..Default::default()
            },
            EngineConfig {
                g: 1.1,
                ..Default::default()
            },
            EngineConfig {
                p: 0.5,
                ..Default::default()
            },
            EngineConfig {
                epsilon: 0.0,
                ..Default::default()
            },
            EngineConfig {
                max_iters: 0,
                ..Default::default()
            },
            EngineConfig {
                r1: 0,
                ..Default::default()
            },
        ] {
            assert!(bad.validate().is_err(), "{bad:?}");
        }
        let x = data(&[vec![0.0], vec![1.0]]);
        let u = MembershipMatrix::new(1, 2, vec![1.0, 1.0]).unwrap();
        let p3 = EngineConfig {
            p: 3.0,
            ..Default::default()
        };
        assert!(gfc_fit(&x, &u, &p3).is_err());
    }

    #[test]
    fn single_point_fit() {
        let x = data(&[vec![2.5, -1.0]]);
        let u = MembershipMatrix::new(1, 1, vec![1.0]).unwrap();
        let fit = gfc_fit(&x, &u, &EngineConfig::default()).unwrap();
        assert_eq!(fit.iterations, 1);
        assert!(fit.converged);
        assert_eq!(fit.prototypes, vec![vec![2.5, -1.0]]);
        assert_eq!(fit.memberships.values(), &[1.0]);
    }

    #[test]
    fn principal_axes_of_a_line() {
        let rows: Vec<Vec<f64>> = (0..20)
            .map(|k| vec![k as f64, 2.0 * k as f64 + 0.01 * ((k % 3) as f64)])
            .collect();
        let x = data(&rows);
        let mu = vec![1.0; 20];
        let v = update_prototypes(
            &x,
            &MembershipMatrix::from_raw(1, 20, mu.clone()),
            &EngineConfig::default(),
        )
        .unwrap();
        let axes = principal_axes(&x, &mu, &v[0], &EngineConfig::default()).unwrap();
        assert_eq!(axes.rank(), 1);
        let s = &axes.directions[0];
        let expect = [1.0 / 5f64.sqrt(), 2.0 / 5f64.sqrt()];
        assert!((s[0] - expect[0]).abs() < 1e-3 && (s[1] - expect[1]).abs() < 1e-3);
        let one_d = data(&[vec![1.0], vec![2.0]]);
        assert_eq!(
            principal_axes(&one_d, &[1.0, 1.0], &[1.5], &EngineConfig::default())
                .unwrap()
                .rank(),
            0
        );
    }
}
