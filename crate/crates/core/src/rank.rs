//! Minimum-description-length choice of the number of principal axes kept
//! per cluster.

use crate::error::{Error, Result};

/// Eigenvalues below this fraction of the largest one are treated as zero.
pub const RELATIVE_ZERO: f64 = 1e-10;

/// Non-increasing, non-negative eigenvalues of one cluster's scatter matrix,
/// together with the sample count backing them.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    eigenvalues: Vec<f64>,
    samples: f64,
}

impl Spectrum {
    /// Sorts the eigenvalues, flushes round-off below
    /// `RELATIVE_ZERO * max` to exactly zero and rejects genuinely negative
    /// values.
    pub fn new(mut eigenvalues: Vec<f64>, samples: f64) -> Result<Self> {
        if eigenvalues.iter().any(|v| !v.is_finite()) {
            return Err(Error::param("spectrum contains non-finite eigenvalues"));
        }
        if !(samples >= 1.0) {
            return Err(Error::param(format!(
                "spectrum sample count must be >= 1, got {samples}"
            )));
        }
        eigenvalues.sort_by(|a, b| b.total_cmp(a));
        let top = eigenvalues.first().copied().unwrap_or(0.0).max(0.0);
        let cutoff = RELATIVE_ZERO * top;
        for v in &mut eigenvalues {
            if v.abs() <= cutoff {
                *v = 0.0;
            } else if *v < 0.0 {
                return Err(Error::param(format!("negative eigenvalue {v} in spectrum")));
            }
        }
        Ok(Self {
            eigenvalues,
            samples,
        })
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn samples(&self) -> f64 {
        self.samples
    }

    /// Number of strictly positive eigenvalues.
    pub fn numerical_rank(&self) -> usize {
        self.eigenvalues.iter().take_while(|&&v| v > 0.0).count()
    }

    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.eigenvalues.iter().map(|v| v * c).collect(),
            self.samples,
        )
    }
}

/// Description length of keeping `j` leading axes:
///
/// ```text
/// MDL(j) = -(n - j) N ln(G / A) + j (2n - j) ln(N) / 2
/// ```
///
/// with G and A the geometric and arithmetic means of the trailing
/// eigenvalues. Zero eigenvalues mark directions with no variance at all;
/// they are dropped and `n` becomes the numerical rank. When nothing
/// positive trails `j` the score is `+inf`.
pub fn mdl_score(spec: &Spectrum, j: usize) -> Result<f64> {
    let n = spec.dim();
    if j == 0 || j >= n {
        return Err(Error::param(format!(
            "MDL index {j} outside [1, {}]",
            n.saturating_sub(1)
        )));
    }
    let n_eff = spec.numerical_rank();
    if j >= n_eff {
        return Ok(f64::INFINITY);
    }
    let tail = &spec.eigenvalues[j..n_eff];
    let count = tail.len() as f64;
    let arith = tail.iter().sum::<f64>() / count;
    let log_geo = tail.iter().map(|v| v.ln()).sum::<f64>() / count;
    // ln(G/A) <= 0 by AM-GM; clamp the round-off
    let log_ratio = (log_geo - arith.ln()).min(0.0);

    let n_f = n_eff as f64;
    let j_f = j as f64;
    let ln_samples = spec.samples.ln();
    Ok(-(n_f - j_f) * spec.samples * log_ratio + 0.5 * j_f * (2.0 * n_f - j_f) * ln_samples)
}

/// `argmin_{j in [r1, n-1]} MDL(j)`, ties going to the smaller `j`. When
/// every candidate scores `+inf` (rank-deficient spectrum) `r1` is
/// returned.
pub fn select_rank(spec: &Spectrum, r1: usize) -> Result<usize> {
    let n = spec.dim();
    if n < 2 {
        return Err(Error::NoAdmissibleRank(n));
    }
    if r1 == 0 || r1 > n - 1 {
        return Err(Error::param(format!(
            "minimum rank r1 = {r1} outside [1, {}]",
            n - 1
        )));
    }
    let mut best = (r1, mdl_score(spec, r1)?);
    for j in (r1 + 1)..n {
        let score = mdl_score(spec, j)?;
        if score < best.1 {
            best = (j, score);
        }
    }
    Ok(best.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec(l: &[f64], n: f64) -> Spectrum {
        Spectrum::new(l.to_vec(), n).unwrap()
    }

    // Direct evaluation of the description length on a full-rank spectrum,
    // written without the rank truncation path.
    fn oracle(l: &[f64], j: usize, samples: f64) -> f64 {
        let n = l.len() as f64;
        let tail = &l[j..];
        let k = tail.len() as f64;
        let g = tail.iter().product::<f64>().powf(1.0 / k);
        let a = tail.iter().sum::<f64>() / k;
        -(n - j as f64) * samples * (g / a).ln()
            + 0.5 * j as f64 * (2.0 * n - j as f64) * samples.ln()
    }

    #[test]
    fn equal_tail_leaves_only_penalty() {
        let s = mdl_score(&spec(&[4.0, 1.0, 1.0], 100.0), 1).unwrap();
        assert!((s - 2.5 * 100f64.ln()).abs() < 1e-12);
        assert!((s - 11.512925464970229).abs() < 1e-9);
    }

    #[test]
    fn matches_direct_formula() {
        // G = sqrt(2), A = 1.5 -> -2*50*ln(0.942809) + 2.5 ln 50
        let s = mdl_score(&spec(&[4.0, 2.0, 1.0], 50.0), 1).unwrap();
        assert!((s - oracle(&[4.0, 2.0, 1.0], 1, 50.0)).abs() < 1e-10);
        assert!((s - 15.669_209_296_389_525).abs() < 1e-9, "{s}");
    }

    #[test]
    fn all_zero_tail_is_infinite() {
        let s = spec(&[3.0, 0.0, 0.0], 10.0);
        assert_eq!(mdl_score(&s, 1).unwrap(), f64::INFINITY);
        assert_eq!(select_rank(&s, 1).unwrap(), 1);
    }

    #[test]
    fn zero_direction_is_dropped() {
        // one zero-variance direction behaves like the 3-d spectrum
        let with_zero = spec(&[5.0, 2.0, 1.0, 0.0], 40.0);
        let without = spec(&[5.0, 2.0, 1.0], 40.0);
        for j in 1..=2 {
            assert_eq!(
                mdl_score(&with_zero, j).unwrap(),
                mdl_score(&without, j).unwrap()
            );
        }
        assert_eq!(mdl_score(&with_zero, 3).unwrap(), f64::INFINITY);
    }

    #[test]
    fn round_off_is_flushed() {
        let s = spec(&[1.0, 0.5, 1e-17, -1e-17], 10.0);
        assert_eq!(s.eigenvalues(), &[1.0, 0.5, 0.0, 0.0]);
        assert!(Spectrum::new(vec![1.0, -0.1], 10.0).is_err());
        assert!(Spectrum::new(vec![1.0, f64::NAN], 10.0).is_err());
    }

    #[test]
    fn flat_spectrum_selects_minimum_rank() {
        assert_eq!(select_rank(&spec(&[2.0; 5], 100.0), 1).unwrap(), 1);
        assert_eq!(select_rank(&spec(&[2.0; 5], 100.0), 3).unwrap(), 3);
    }

    #[test]
    fn dominant_axis_selects_one() {
        let l = [100.0, 1.01, 1.0, 1.0, 0.99];
        let s = spec(&l, 200.0);
        let brute = (1..5)
            .map(|j| (j, oracle(&l, j, 200.0)))
            .fold((0, f64::INFINITY), |b, x| if x.1 < b.1 { x } else { b });
        assert_eq!(brute.0, 1);
        assert_eq!(select_rank(&s, 1).unwrap(), 1);
    }

    #[test]
    fn two_dims_has_single_candidate() {
        assert_eq!(select_rank(&spec(&[9.0, 0.1], 30.0), 1).unwrap(), 1);
        assert_eq!(select_rank(&spec(&[9.0, 9.0], 30.0), 1).unwrap(), 1);
    }

    #[test]
    fn rank_errors() {
        assert!(matches!(
            select_rank(&spec(&[1.0], 5.0), 1),
            Err(Error::NoAdmissibleRank(1))
        ));
        assert!(select_rank(&spec(&[1.0, 1.0, 1.0], 5.0), 0).is_err());
        assert!(select_rank(&spec(&[1.0, 1.0, 1.0], 5.0), 3).is_err());
        assert!(mdl_score(&spec(&[1.0, 1.0, 1.0], 5.0), 3).is_err());
    }
}
