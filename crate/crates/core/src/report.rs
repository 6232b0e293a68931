//! JSON run reports and membership CSV export.
//!
//! A fit report is a single pretty-printed JSON object with the keys
//! `config`, `seed`, `final_c`, `prototypes`, `ranks`, `dispersions`,
//! `memberships_path`, `trace` and `indices`. Non-finite floats are written
//! as the strings `"inf"`, `"-inf"` and `"nan"`. The membership matrix goes
//! to a sibling CSV file with one row per point and one column per
//! cluster (`cluster_0`, `cluster_1`, ...); `memberships_path` holds its
//! path relative to the report.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::engine::MembershipMatrix;
use crate::error::{Error, Result};
use crate::linalg::DataMatrix;
use crate::pipeline::{GfcSdConfig, GfcSdResult, SweepResult, TraceEntry};
use crate::validity::{xie_beni, ConfusionMatrix};

/// Serde adapter for `f64` that round-trips infinities and NaN.
pub mod float_ext {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else if v.is_nan() {
            s.serialize_str("nan")
        } else if *v > 0.0 {
            s.serialize_str("inf")
        } else {
            s.serialize_str("-inf")
        }
    }

    #[derive(Deserialize)]
    #[serde(untagged)]
    enum Repr {
        Num(f64),
        Text(String),
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Text(t) => match t.as_str() {
                "inf" => Ok(f64::INFINITY),
                "-inf" => Ok(f64::NEG_INFINITY),
                "nan" => Ok(f64::NAN),
                other => Err(serde::de::Error::custom(format!("invalid float {other:?}"))),
            },
        }
    }
}

/// [`float_ext`] for optional values; `None` is `null`.
pub mod opt_float_ext {
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    #[derive(Serialize, Deserialize)]
    #[serde(transparent)]
    struct Wrap(#[serde(with = "super::float_ext")] f64);

    pub fn serialize<S: Serializer>(v: &Option<f64>, s: S) -> Result<S::Ok, S::Error> {
        v.map(Wrap).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<f64>, D::Error> {
        Ok(Option::<Wrap>::deserialize(d)?.map(|w| w.0))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Indices {
    /// Fuzzy DB index of the final partition.
    #[serde(with = "opt_float_ext")]
    pub db_fr: Option<f64>,
    #[serde(with = "opt_float_ext")]
    pub xie_beni: Option<f64>,
    /// Cluster count with the lowest fuzzy DB index along the trace.
    pub db_fr_min_c: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub confusion: Option<ConfusionMatrix>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub config: GfcSdConfig,
    pub seed: u64,
    pub final_c: usize,
    pub prototypes: Vec<Vec<f64>>,
    pub ranks: Vec<usize>,
    pub dispersions: Vec<f64>,
    pub memberships_path: String,
    pub trace: Vec<TraceEntry>,
    pub indices: Indices,
}

impl FitReport {
    /// Collects everything except the memberships path, which is filled in
    /// by [`write_report`].
    pub fn new(
        x: &DataMatrix,
        result: &GfcSdResult,
        config: &GfcSdConfig,
        seed: u64,
    ) -> Result<Self> {
        let db_fr = result.trace.iterations.last().and_then(|e| e.db_fr);
        let xb = if result.clusters() >= 2 {
            Some(xie_beni(x, &result.memberships, &result.model.prototypes)?)
        } else {
            None
        };
        Ok(Self {
            config: config.clone(),
            seed,
            final_c: result.clusters(),
            prototypes: result.model.prototypes.clone(),
            ranks: result.model.ranks(),
            dispersions: result.model.dispersions.clone(),
            memberships_path: String::new(),
            trace: result.trace.iterations.clone(),
            indices: Indices {
                db_fr,
                xie_beni: xb,
                db_fr_min_c: result.trace.db_fr_minimizing_c(),
                accuracy: None,
                confusion: None,
            },
        })
    }

    /// Copy with every timing field zeroed, for reproducibility checks.
    pub fn without_timing(&self) -> Self {
        let mut r = self.clone();
        for e in &mut r.trace {
            e.elapsed_ms = 0.0;
        }
        r
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub seed: u64,
    pub c_min: usize,
    pub c_max: usize,
    pub restarts: usize,
    pub best_c: usize,
    pub curve: Vec<crate::pipeline::SweepPoint>,
}

impl SweepReport {
    pub fn new(
        result: &SweepResult,
        c_min: usize,
        c_max: usize,
        restarts: usize,
        seed: u64,
    ) -> Self {
        Self {
            seed,
            c_min,
            c_max,
            restarts,
            best_c: result.best_c,
            curve: result.curve.clone(),
        }
    }
}

/// `report.json` -> `report.memberships.csv`
pub fn memberships_path_for(report_path: &Path) -> PathBuf {
    let stem = report_path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "report".into());
    report_path.with_file_name(format!("{stem}.memberships.csv"))
}

/// Writes the membership CSV next to `path`, records its relative location
/// in the report, then writes the report itself.
pub fn write_report(
    report: &mut FitReport,
    memberships: &MembershipMatrix,
    path: impl AsRef<Path>,
) -> Result<()> {
    let path = path.as_ref();
    let csv_path = memberships_path_for(path);
    write_memberships_csv(&csv_path, memberships)?;
    report.memberships_path = csv_path
        .file_name()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    write_json(report, path)
}

pub fn read_report(path: impl AsRef<Path>) -> Result<FitReport> {
    read_json(path.as_ref())
}

pub fn write_json<T: Serialize>(value: &T, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })?;
    w.write_all(b"\n")
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_reader(std::io::BufReader::new(f)).map_err(|e| Error::Format {
        path: path.to_path_buf(),
        message: e.to_string(),
    })
}

pub fn write_memberships_csv(path: impl AsRef<Path>, u: &MembershipMatrix) -> Result<()> {
    let path = path.as_ref();
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    let header: Vec<String> = (0..u.clusters()).map(|i| format!("cluster_{i}")).collect();
    let mut text = header.join(",");
    text.push('\n');
    for k in 0..u.points() {
        let cells: Vec<String> = (0..u.clusters()).map(|i| u.get(i, k).to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    w.write_all(text.as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| Error::io(path, e))
}

/// Reads a membership CSV back into cluster-major form.
pub fn read_memberships_csv(path: impl AsRef<Path>) -> Result<MembershipMatrix> {
    let ds = crate::io::load_csv(path.as_ref(), true, None)?;
    let (points, clusters) = (ds.data.rows(), ds.data.cols());
    let mut values = vec![0.0; points * clusters];
    for (k, row) in ds.data.iter_rows().enumerate() {
        for (i, &v) in row.iter().enumerate() {
            values[i * points + k] = v;
        }
    }
    MembershipMatrix::new(clusters, points, values)
}
