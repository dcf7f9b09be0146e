//! Matrix JSON schema and trajectory CSV output.
//!
//! Matrices are stored as `{"dim": n, "data": [[[re, im], …], …]}` in row
//! order. Trajectories are written as CSV (`t,value` or `t,re,im`) with a
//! JSON sidecar holding the metadata. Floats are printed in shortest
//! round-trip form, so a write/read cycle is exact.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use num_complex::Complex64 as C64;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::dynamics::{TrajValues, Trajectory};
use crate::error::{Error, Result};
use crate::matcore::ComplexMatrix;

#[derive(Serialize)]
struct MatrixJsonRef {
    dim: usize,
    data: Vec<Vec<[f64; 2]>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct MatrixJson {
    dim: usize,
    data: Vec<Vec<[f64; 2]>>,
}

impl Serialize for ComplexMatrix {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let data = (0..self.dim()).map(|i| self.row(i).iter().map(|z| [z.re, z.im]).collect()).collect();
        MatrixJsonRef { dim: self.dim(), data }.serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for ComplexMatrix {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let raw = MatrixJson::deserialize(deserializer)?;
        matrix_from_parts(raw).map_err(D::Error::custom)
    }
}

fn matrix_from_parts(raw: MatrixJson) -> std::result::Result<ComplexMatrix, String> {
    if raw.dim == 0 {
        return Err("`dim` must be positive".into());
    }
    if raw.data.len() != raw.dim {
        return Err(format!("`data` has {} rows but `dim` is {}", raw.data.len(), raw.dim));
    }
    let mut flat = Vec::with_capacity(raw.dim * raw.dim);
    for (i, row) in raw.data.iter().enumerate() {
        if row.len() != raw.dim {
            return Err(format!("row {i} has {} entries but `dim` is {}; matrix must be square", row.len(), raw.dim));
        }
        for (j, &[re, im]) in row.iter().enumerate() {
            if !re.is_finite() || !im.is_finite() {
                return Err(format!("entry ({i}, {j}) is not finite"));
            }
            flat.push(C64::new(re, im));
        }
    }
    ComplexMatrix::from_row_major(raw.dim, flat).map_err(|e| e.to_string())
}

/// Parses a matrix from JSON text, reporting line and column on failure.
pub fn matrix_from_json_str(text: &str) -> Result<ComplexMatrix> {
    serde_json::from_str(text).map_err(|e| {
        // NaN and Infinity are not JSON tokens, so they surface as syntax errors.
        Error::Parse(format!("line {}, column {}: {}", e.line(), e.column(), e))
    })
}

pub fn matrix_to_json_string(m: &ComplexMatrix) -> String {
    serde_json::to_string_pretty(m).expect("matrix serialization is infallible")
}

pub fn read_matrix_file(path: &Path) -> Result<ComplexMatrix> {
    let text = fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    matrix_from_json_str(&text).map_err(|e| match e {
        Error::Parse(msg) => Error::Parse(format!("{}: {msg}", path.display())),
        other => other,
    })
}

pub fn write_matrix_file(path: &Path, m: &ComplexMatrix) -> std::io::Result<()> {
    fs::write(path, matrix_to_json_string(m))
}

/// CSV body of a trajectory.
pub fn trajectory_csv(traj: &Trajectory) -> String {
    let mut out = String::new();
    match &traj.values {
        TrajValues::Real(v) => {
            out.push_str("t,value\n");
            for (t, x) in traj.grid.times().iter().zip(v) {
                let _ = writeln!(out, "{t},{x}");
            }
        }
        TrajValues::Complex(v) => {
            out.push_str("t,re,im\n");
            for (t, z) in traj.grid.times().iter().zip(v) {
                let _ = writeln!(out, "{t},{},{}", z.re, z.im);
            }
        }
    }
    out
}

/// Writes `<stem>.csv` and `<stem>.json` (metadata) into `dir`, after
/// checking the trajectory invariants. Returns the CSV path.
pub fn write_trajectory(dir: &Path, stem: &str, traj: &Trajectory) -> Result<PathBuf> {
    traj.validate()?;
    let csv = dir.join(format!("{stem}.csv"));
    let meta = dir.join(format!("{stem}.json"));
    let io_err = |p: &Path, e: std::io::Error| Error::InvalidArgument(format!("cannot write {}: {e}", p.display()));
    fs::write(&csv, trajectory_csv(traj)).map_err(|e| io_err(&csv, e))?;
    let sidecar = serde_json::json!({
        "meta": traj.meta,
        "points": traj.len(),
        "spacing": traj.grid.spacing(),
        "columns": match traj.values { TrajValues::Real(_) => vec!["t", "value"], TrajValues::Complex(_) => vec!["t", "re", "im"] },
    });
    fs::write(&meta, serde_json::to_string_pretty(&sidecar).expect("json")).map_err(|e| io_err(&meta, e))?;
    Ok(csv)
}

/// Parses a `t,value` CSV body back into `(times, values)`.
pub fn parse_real_csv(text: &str) -> Result<(Vec<f64>, Vec<f64>)> {
    let mut lines = text.lines();
    match lines.next() {
        Some("t,value") => {}
        other => return Err(Error::Parse(format!("unexpected CSV header {other:?}"))),
    }
    let mut ts = Vec::new();
    let mut vs = Vec::new();
    for (i, line) in lines.enumerate() {
        let (t, v) = line.split_once(',').ok_or_else(|| Error::Parse(format!("line {}: expected two columns", i + 2)))?;
        let parse = |s: &str| s.parse::<f64>().map_err(|_| Error::Parse(format!("line {}: bad number `{s}`", i + 2)));
        ts.push(parse(t)?);
        vs.push(parse(v)?);
    }
    Ok((ts, vs))
}
