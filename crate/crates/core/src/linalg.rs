//! Dense kernels: the data matrix, p-norm distances and a cyclic Jacobi
//! eigensolver for small symmetric matrices.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// N observations of dimension n, stored row-major. Every entry is finite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataMatrix {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl DataMatrix {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::param(
                "data matrix needs at least one row and one column",
            ));
        }
        if values.len() != rows * cols {
            return Err(Error::DimensionMismatch {
                expected: rows * cols,
                found: values.len(),
            });
        }
        if let Some(pos) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(pos));
        }
        Ok(Self { rows, cols, values })
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        let mut values = Vec::with_capacity(rows.len() * cols);
        for row in rows {
            if row.len() != cols {
                return Err(Error::DimensionMismatch {
                    expected: cols,
                    found: row.len(),
                });
            }
            values.extend_from_slice(row);
        }
        Self::new(rows.len(), cols, values)
    }

    /// Number of observations N.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Dimensionality n.
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, k: usize) -> &[f64] {
        &self.values[k * self.cols..(k + 1) * self.cols]
    }

    pub fn iter_rows(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.values.chunks_exact(self.cols)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }
}

/// Square symmetric matrix. Symmetry is enforced on construction by
/// mirroring the upper triangle.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    dim: usize,
    values: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(dim: usize) -> Self {
        Self {
            dim,
            values: vec![0.0; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.values[i * dim + i] = 1.0;
        }
        m
    }

    pub fn diagonal(diag: &[f64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m.values[i * diag.len() + i] = d;
        }
        m
    }

    /// Builds from a row-major square buffer, copying the upper triangle
    /// onto the lower one.
    pub fn from_upper(dim: usize, mut values: Vec<f64>) -> Result<Self> {
        if values.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: values.len(),
            });
        }
        for i in 0..dim {
            for j in 0..i {
                values[i * dim + j] = values[j * dim + i];
            }
        }
        Ok(Self { dim, values })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.values[i * self.dim + j]
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Adds `w * a a^T`.
    pub(crate) fn add_outer(&mut self, w: f64, a: &[f64]) {
        let n = self.dim;
        for (i, &ai) in a.iter().enumerate() {
            let wa = w * ai;
            for (j, &aj) in a.iter().enumerate().skip(i) {
                self.values[i * n + j] += wa * aj;
            }
        }
    }

    pub(crate) fn mirror_upper(&mut self) {
        let n = self.dim;
        for i in 0..n {
            for j in 0..i {
                self.values[i * n + j] = self.values[j * n + i];
            }
        }
    }

    pub fn shifted(&self, c: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.values[i * self.dim + i] += c;
        }
        m
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            values: self.values.iter().map(|v| v * c).collect(),
        }
    }
}

/// Eigenpairs sorted by non-increasing eigenvalue.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// `eigenvectors[j]` belongs to `eigenvalues[j]`.
    pub eigenvectors: Vec<Vec<f64>>,
}

impl EigenDecomposition {
    pub fn reconstruct(&self) -> SymmetricMatrix {
        let n = self.eigenvalues.len();
        let mut m = SymmetricMatrix::zeros(n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            m.add_outer(*lambda, v);
        }
        m.mirror_upper();
        m
    }
}

/// Sum of `|x_d - v_d|^p`: the p-th power of the p-norm distance.
pub fn pnorm_dist(x: &[f64], v: &[f64], p: f64) -> Result<f64> {
    if x.len() != v.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            found: v.len(),
        });
    }
    if !(p >= 1.0) {
        return Err(Error::param(format!("norm order p must be >= 1, got {p}")));
    }
    Ok(pnorm_unchecked(x, v, p))
}

pub(crate) fn pnorm_unchecked(x: &[f64], v: &[f64], p: f64) -> f64 {
    if p == 2.0 {
        sq_euclidean(x, v)
    } else if p == 1.0 {
        x.iter().zip(v).map(|(a, b)| (a - b).abs()).sum()
    } else {
        x.iter().zip(v).map(|(a, b)| (a - b).abs().powf(p)).sum()
    }
}

pub(crate) fn sq_euclidean(x: &[f64], v: &[f64]) -> f64 {
    x.iter()
        .zip(v)
        .map(|(a, b)| {
            let d = a - b;
            d * d
        })
        .sum()
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

const JACOBI_TOL: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Cyclic Jacobi eigendecomposition.
///
/// Sweeps over every off-diagonal pair, annihilating each with a plane
/// rotation, until the off-diagonal Frobenius norm falls below `1e-12`
/// times the Frobenius norm of the input. Eigenvectors are normalized so
/// that their first non-negligible component is positive.
pub fn sym_eig(m: &SymmetricMatrix) -> Result<EigenDecomposition> {
    if let Some(pos) = m.values.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(pos));
    }
    let n = m.dim;
    let mut a = m.values.clone();
    let mut q = SymmetricMatrix::identity(n).values;

    let frob = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    let off_norm = |a: &[f64]| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += 2.0 * a[i * n + j] * a[i * n + j];
            }
        }
        s.sqrt()
    };

    let mut converged = off_norm(&a) <= JACOBI_TOL * frob;
    let mut sweeps = 0;
    while !converged {
        if sweeps == JACOBI_MAX_SWEEPS {
            return Err(Error::EigenNoConvergence { sweeps });
        }
        sweeps += 1;
        for p in 0..n {
            for r in (p + 1)..n {
                let apr = a[p * n + r];
                if apr == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let arr = a[r * n + r];
                let theta = (arr - app) / (2.0 * apr);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;

                a[p * n + p] = app - t * apr;
                a[r * n + r] = arr + t * apr;
                a[p * n + r] = 0.0;
                a[r * n + p] = 0.0;
                for k in 0..n {
                    if k != p && k != r {
                        let akp = a[k * n + p];
                        let akr = a[k * n + r];
                        let new_kp = c * akp - s * akr;
                        let new_kr = s * akp + c * akr;
                        a[k * n + p] = new_kp;
                        a[p * n + k] = new_kp;
                        a[k * n + r] = new_kr;
                        a[r * n + k] = new_kr;
                    }
                }
                // columns of q hold the eigenvectors
                for k in 0..n {
                    let qkp = q[k * n + p];
                    let qkr = q[k * n + r];
                    q[k * n + p] = c * qkp - s * qkr;
                    q[k * n + r] = s * qkp + c * qkr;
                }
            }
        }
        converged = off_norm(&a) <= JACOBI_TOL * frob;
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[j * n + j].total_cmp(&a[i * n + i]).then(i.cmp(&j)));

    let eigenvalues = order.iter().map(|&j| a[j * n + j]).collect();
    let eigenvectors = order
        .iter()
        .map(|&j| {
            let mut v: Vec<f64> = (0..n).map(|k| q[k * n + j]).collect();
            if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
                if *first < 0.0 {
                    v.iter_mut().for_each(|x| *x = -*x);
                }
            }
            v
        })
        .collect();

    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}
