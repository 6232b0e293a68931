//! Dataset ingestion, row normalization and synthetic mixtures.

use std::collections::HashMap;
use std::fs::File;
use std::io::Write;
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::DataMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    pub data: DataMatrix,
    /// Factor-encoded labels in order of first appearance.
    pub labels: Option<Vec<usize>>,
    /// Original label text for each code.
    pub label_names: Option<Vec<String>>,
    pub feature_names: Option<Vec<String>>,
}

impl LabeledDataset {
    pub fn class_count(&self) -> usize {
        self.label_names.as_ref().map_or(0, Vec::len)
    }
}

/// Reads a comma-separated numeric table.
///
/// `label_column` (0-based) is pulled out of the features and encoded as
/// integers by first appearance. Errors report 1-based line and column.
pub fn load_csv(
    path: impl AsRef<Path>,
    has_header: bool,
    label_column: Option<usize>,
) -> Result<LabeledDataset> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_csv(file, path, has_header, label_column)
}

pub(crate) fn read_csv<R: std::io::Read>(
    reader: R,
    path: &Path,
    has_header: bool,
    label_column: Option<usize>,
) -> Result<LabeledDataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(reader);
    let csv_err = |row: usize, column: usize, message: String| Error::Csv {
        path: path.to_path_buf(),
        row,
        column,
        message,
    };

    let header: Option<Vec<String>> = if has_header {
        let h = rdr.headers().map_err(|e| csv_err(1, 0, e.to_string()))?;
        Some(h.iter().map(str::to_owned).collect())
    } else {
        None
    };

    let mut width: Option<usize> = header.as_ref().map(Vec::len);
    let mut values = Vec::new();
    let mut labels = Vec::new();
    let mut label_codes: HashMap<String, usize> = HashMap::new();
    let mut label_names = Vec::new();
    let mut rows = 0;

    for record in rdr.records() {
        let record = record.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            csv_err(line, 0, e.to_string())
        })?;
        let line = record.position().map_or(rows + 1, |p| p.line() as usize);
        if record.iter().all(str::is_empty) {
            continue;
        }
        match width {
            None => width = Some(record.len()),
            Some(w) if w != record.len() => {
                return Err(csv_err(
                    line,
                    record.len(),
                    format!("expected {w} fields, found {}", record.len()),
                ));
            }
            Some(_) => {}
        }
        if let Some(lc) = label_column {
            if lc >= record.len() {
                return Err(csv_err(
                    line,
                    lc + 1,
                    format!("label column {} out of range", lc + 1),
                ));
            }
        }
        for (col, field) in record.iter().enumerate() {
            if Some(col) == label_column {
                let next = label_codes.len();
                let code = *label_codes.entry(field.to_owned()).or_insert_with(|| {
                    label_names.push(field.to_owned());
                    next
                });
                labels.push(code);
                continue;
            }
            let v: f64 = field.parse().map_err(|_| {
                csv_err(line, col + 1, format!("cannot parse {field:?} as a number"))
            })?;
            if !v.is_finite() {
                return Err(csv_err(
                    line,
                    col + 1,
                    format!("non-finite value {field:?}"),
                ));
            }
            values.push(v);
        }
        rows += 1;
    }

    let total = width.unwrap_or(0);
    let cols = total - usize::from(label_column.is_some());
    if rows == 0 || cols == 0 {
        return Err(Error::Format {
            path: path.to_path_buf(),
            message: "no numeric data".into(),
        });
    }
    let feature_names = header.map(|h| {
        h.into_iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != label_column)
            .map(|(_, s)| s)
            .collect()
    });
    Ok(LabeledDataset {
        data: DataMatrix::new(rows, cols, values)?,
        labels: label_column.map(|_| labels),
        label_names: label_column.map(|_| label_names),
        feature_names,
    })
}

/// Writes features (and labels, if any) as CSV with a header row
/// `x0,...,x{n-1}[,label]`.
pub fn write_csv(
    path: impl AsRef<Path>,
    data: &DataMatrix,
    labels: Option<&[usize]>,
) -> Result<()> {
    let path = path.as_ref();
    let mut out = String::new();
    let names: Vec<String> = (0..data.cols()).map(|j| format!("x{j}")).collect();
    out.push_str(&names.join(","));
    if labels.is_some() {
        out.push_str(",label");
    }
    out.push('\n');
    for (k, row) in data.iter_rows().enumerate() {
        let cells: Vec<String> = row.iter().map(f64::to_string).collect();
        out.push_str(&cells.join(","));
        if let Some(l) = labels {
            out.push(',');
            out.push_str(&l[k].to_string());
        }
        out.push('\n');
    }
    let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

/// Centers every row on its own mean and divides by its population
/// standard deviation. Constant rows become all zeros.
pub fn variance_normalize(data: &DataMatrix) -> DataMatrix {
    let n = data.cols() as f64;
    let mut values = Vec::with_capacity(data.values().len());
    for row in data.iter_rows() {
        let mean = row.iter().sum::<f64>() / n;
        let var = row.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n;
        let sd = var.sqrt();
        if sd > 0.0 && sd > f64::EPSILON * mean.abs() {
            values.extend(row.iter().map(|v| (v - mean) / sd));
        } else {
            values.extend(std::iter::repeat_n(0.0, row.len()));
        }
    }
    DataMatrix::new(data.rows(), data.cols(), values).expect("same shape, finite values")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureGroup {
    pub center: Vec<f64>,
    /// Isotropic standard deviation.
    pub sigma: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixtureSpec {
    pub groups: Vec<MixtureGroup>,
    #[serde(default)]
    pub seed: u64,
}

/// Centers and sizes of the four-group, unevenly populated 2-D set.
pub const UNEVEN_CENTERS: [[f64; 2]; 4] = [[-0.5, -0.4], [0.1, 0.2], [0.5, 0.7], [0.6, -0.3]];
pub const UNEVEN_COUNTS: [usize; 4] = [300, 30, 30, 50];
/// Default spread of the uneven groups.
pub const UNEVEN_SIGMA: f64 = 0.1;

impl MixtureSpec {
    pub fn validate(&self) -> Result<()> {
        let dim = self.groups.first().map(|g| g.center.len()).unwrap_or(0);
        if dim == 0 {
            return Err(Error::param(
                "mixture needs at least one group with a non-empty center",
            ));
        }
        for (i, g) in self.groups.iter().enumerate() {
            if g.center.len() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    found: g.center.len(),
                });
            }
            if g.count == 0 || !(g.sigma > 0.0) || !g.sigma.is_finite() {
                return Err(Error::param(format!(
                    "group {i}: count must be >= 1 and sigma > 0 (count = {}, sigma = {})",
                    g.count, g.sigma
                )));
            }
            if g.center.iter().any(|v| !v.is_finite()) {
                return Err(Error::param(format!("group {i}: non-finite center")));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.groups.first().map_or(0, |g| g.center.len())
    }

    pub fn total(&self) -> usize {
        self.groups.iter().map(|g| g.count).sum()
    }

    /// Four groups of 300, 30, 30 and 50 points in the plane.
    pub fn uneven_four_groups(sigma: f64, seed: u64) -> Self {
        Self {
            groups: UNEVEN_CENTERS
                .iter()
                .zip(UNEVEN_COUNTS)
                .map(|(c, count)| MixtureGroup {
                    center: c.to_vec(),
                    sigma,
                    count,
                })
                .collect(),
            seed,
        }
    }

    /// `groups` random profiles with standard-normal coordinates, each
    /// with `per_group` noisy copies. Intended to be variance-normalized,
    /// like expression profiles across experiments.
    pub fn random_profiles(
        groups: usize,
        dim: usize,
        per_group: usize,
        sigma: f64,
        seed: u64,
    ) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let groups = (0..groups)
            .map(|_| MixtureGroup {
                center: (0..dim).map(|_| StandardNormal.sample(&mut rng)).collect(),
                sigma,
                count: per_group,
            })
            .collect();
        Self {
            groups,
            seed: seed.wrapping_add(1),
        }
    }
}

/// Isotropic Gaussian samples, group by group; labels are group indices.
pub fn gen_gaussian_mixture(spec: &MixtureSpec) -> Result<LabeledDataset> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let dim = spec.dim();
    let mut values = Vec::with_capacity(spec.total() * dim);
    let mut labels = Vec::with_capacity(spec.total());
    for (i, g) in spec.groups.iter().enumerate() {
        for _ in 0..g.count {
            for &c in &g.center {
                let z: f64 = StandardNormal.sample(&mut rng);
                values.push(c + g.sigma * z);
            }
            labels.push(i);
        }
    }
    Ok(LabeledDataset {
        data: DataMatrix::new(spec.total(), dim, values)?,
        labels: Some(labels),
        label_names: Some((0..spec.groups.len()).map(|i| i.to_string()).collect()),
        feature_names: None,
    })
}
