//! Independent reference implementations shared by integration tests.
#![allow(dead_code, clippy::needless_range_loop)]

use gfcsd::{DataMatrix, MembershipMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const IRIS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/tests/data/iris.csv");

/// Plain fuzzy c-means written from the textbook update rules, with
/// nested `Vec`s and no shared code with the library.
pub struct FcmOutput {
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
    pub iterations: usize,
}

pub fn textbook_fcm(
    x: &[Vec<f64>],
    u0: &[Vec<f64>],
    m: f64,
    eps: f64,
    max_iters: usize,
) -> FcmOutput {
    let c = u0.len();
    let n_points = x.len();
    let dim = x[0].len();
    let mut u = u0.to_vec();
    let mut v = vec![vec![0.0; dim]; c];
    for iter in 1..=max_iters {
        for i in 0..c {
            let mut num = vec![0.0; dim];
            let mut den = 0.0;
            for k in 0..n_points {
                let w = u[i][k].powf(m);
                den += w;
                for d in 0..dim {
                    num[d] += w * x[k][d];
                }
            }
            for d in 0..dim {
                v[i][d] = num[d] / den;
            }
        }
        let mut next = vec![vec![0.0; n_points]; c];
        for k in 0..n_points {
            let dist: Vec<f64> = (0..c)
                .map(|i| (0..dim).map(|d| (x[k][d] - v[i][d]).powi(2)).sum())
                .collect();
            for i in 0..c {
                let mut s = 0.0;
                for j in 0..c {
                    s += (dist[i] / dist[j]).powf(1.0 / (m - 1.0));
                }
                next[i][k] = 1.0 / s;
            }
        }
        let mut delta: f64 = 0.0;
        for i in 0..c {
            for k in 0..n_points {
                delta = delta.max((next[i][k] - u[i][k]).abs());
            }
        }
        u = next;
        if delta < eps || iter == max_iters {
            return FcmOutput {
                u,
                v,
                iterations: iter,
            };
        }
    }
    unreachable!()
}

/// Dominant eigenpairs by power iteration with Hotelling deflation.
/// Only suitable for matrices with well-separated eigenvalues.
pub fn power_eigen(a: &[Vec<f64>]) -> Vec<(f64, Vec<f64>)> {
    let n = a.len();
    // shift to make the matrix positive definite so the largest eigenvalue
    // is also the largest in magnitude
    let shift: f64 = a
        .iter()
        .enumerate()
        .map(|(i, row)| row.iter().map(|v| v.abs()).sum::<f64>() - a[i][i] + a[i][i].abs())
        .fold(0.0, f64::max)
        + 1.0;
    let mut m: Vec<Vec<f64>> = a.to_vec();
    for i in 0..n {
        m[i][i] += shift;
    }
    let mut out = Vec::new();
    for p in 0..n {
        let mut v: Vec<f64> = (0..n)
            .map(|i| 1.0 + 0.1 * ((i * 7 + p * 3) % 5) as f64)
            .collect();
        let mut lambda = 0.0;
        for _ in 0..200_000 {
            let w: Vec<f64> = (0..n)
                .map(|i| (0..n).map(|j| m[i][j] * v[j]).sum())
                .collect();
            let norm = w.iter().map(|x| x * x).sum::<f64>().sqrt();
            let next: Vec<f64> = w.iter().map(|x| x / norm).collect();
            let diff: f64 = next
                .iter()
                .zip(&v)
                .map(|(a, b)| (a - b).abs())
                .fold(0.0, f64::max);
            v = next;
            lambda = norm;
            if diff < 1e-14 {
                break;
            }
        }
        if let Some(first) = v.iter().find(|x| x.abs() > 1e-12) {
            if *first < 0.0 {
                v.iter_mut().for_each(|x| *x = -*x);
            }
        }
        for i in 0..n {
            for j in 0..n {
                m[i][j] -= lambda * v[i] * v[j];
            }
        }
        out.push((lambda - shift, v));
    }
    out
}

pub fn random_data(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> DataMatrix {
    let values = (0..rows * cols)
        .map(|_| rng.random_range(-1.0..1.0))
        .collect();
    DataMatrix::new(rows, cols, values).unwrap()
}

pub fn to_rows(x: &DataMatrix) -> Vec<Vec<f64>> {
    x.iter_rows().map(<[f64]>::to_vec).collect()
}

pub fn membership_rows(u: &MembershipMatrix) -> Vec<Vec<f64>> {
    u.iter_rows().map(<[f64]>::to_vec).collect()
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn euclid(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).powi(2))
        .sum::<f64>()
        .sqrt()
}
