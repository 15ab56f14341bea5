//! File formats: dense CSV matrices and vectors, JSON sidecars and sampling sets.
//!
//! Floats are written in their shortest round-trip form, so reading a file and
//! writing it back yields the same bytes.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gft::{SamplingSet, VariationOperator};

/// Shortest representation that parses back to the same `f64`: plain decimal
/// for moderate magnitudes, exponent form otherwise.
pub fn format_f64(v: f64) -> String {
    let a = v.abs();
    if v == 0.0 || (1e-5..1e16).contains(&a) || !v.is_finite() {
        format!("{v}")
    } else {
        format!("{v:e}")
    }
}

pub fn parse_f64(token: &str) -> Option<f64> {
    token.trim().parse::<f64>().ok()
}

fn parse_error(source_name: &str, line: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        source_name: source_name.to_string(),
        line,
        message: message.into(),
    }
}

fn io_error(path: &Path, source: std::io::Error) -> Error {
    Error::Io {
        path: path.display().to_string(),
        source,
    }
}

/// Rows of comma-separated values, no header. Blank trailing lines are ignored.
pub fn parse_matrix_csv(text: &str, source_name: &str) -> Result<DMatrix<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    let lines: Vec<&str> = text.lines().collect();
    let last = lines.iter().rposition(|l| !l.trim().is_empty()).map_or(0, |i| i + 1);
    for (i, line) in lines[..last].iter().enumerate() {
        let lineno = i + 1;
        if line.trim().is_empty() {
            return Err(parse_error(source_name, lineno, "empty line"));
        }
        let row = line
            .split(',')
            .enumerate()
            .map(|(c, tok)| {
                parse_f64(tok).ok_or_else(|| {
                    parse_error(source_name, lineno, format!("column {}: '{}' is not a number", c + 1, tok.trim()))
                })
            })
            .collect::<Result<Vec<f64>>>()?;
        if let Some(first) = rows.first() {
            if first.len() != row.len() {
                return Err(parse_error(
                    source_name,
                    lineno,
                    format!("expected {} columns, found {}", first.len(), row.len()),
                ));
            }
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(parse_error(source_name, 1, "no data"));
    }
    let ncols = rows[0].len();
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

pub fn matrix_to_csv(m: &DMatrix<f64>) -> String {
    let mut out = String::new();
    for i in 0..m.nrows() {
        let row: Vec<String> = (0..m.ncols()).map(|j| format_f64(m[(i, j)])).collect();
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// One value per line.
pub fn vector_to_csv(v: &DVector<f64>) -> String {
    let mut out = String::new();
    for x in v.iter() {
        out.push_str(&format_f64(*x));
        out.push('\n');
    }
    out
}

pub fn parse_vector_csv(text: &str, source_name: &str) -> Result<DVector<f64>> {
    let m = parse_matrix_csv(text, source_name)?;
    if m.ncols() != 1 {
        return Err(parse_error(source_name, 1, format!("expected one column, found {}", m.ncols())));
    }
    Ok(m.column(0).into_owned())
}

pub fn read_to_string(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| io_error(path, e))
}

pub fn read_matrix_csv(path: &Path) -> Result<DMatrix<f64>> {
    parse_matrix_csv(&read_to_string(path)?, &path.display().to_string())
}

pub fn read_vector_csv(path: &Path) -> Result<DVector<f64>> {
    parse_vector_csv(&read_to_string(path)?, &path.display().to_string())
}

/// Metadata written next to a matrix CSV.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatrixSidecar {
    pub n: usize,
    pub format: String,
    pub symmetric: bool,
}

impl MatrixSidecar {
    pub fn dense(n: usize, symmetric: bool) -> Self {
        Self {
            n,
            format: "dense-csv".into(),
            symmetric,
        }
    }
}

/// `graph.csv` → `graph.json`.
pub fn sidecar_path(matrix_path: &Path) -> std::path::PathBuf {
    matrix_path.with_extension("json")
}

/// Reads a variation operator from CSV, honoring a sidecar if one exists.
pub fn read_variation_operator(path: &Path) -> Result<VariationOperator> {
    let m = read_matrix_csv(path)?;
    let sidecar = sidecar_path(path);
    if sidecar.exists() && sidecar != path {
        let meta: MatrixSidecar = serde_json::from_str(&read_to_string(&sidecar)?)?;
        if meta.format != "dense-csv" {
            return Err(Error::InvalidConfig(format!(
                "{}: unsupported format '{}'",
                sidecar.display(),
                meta.format
            )));
        }
        if meta.n != m.nrows() {
            return Err(Error::DimensionMismatch {
                expected: meta.n,
                got: m.nrows(),
            });
        }
    }
    VariationOperator::new(m)
}

/// Writes the matrix CSV and its sidecar.
pub fn write_variation_operator(path: &Path, m: &VariationOperator) -> Result<()> {
    write_atomic(path, matrix_to_csv(m.matrix()).as_bytes())?;
    let meta = MatrixSidecar::dense(m.n(), true);
    write_atomic(&sidecar_path(path), to_json_pretty(&meta)?.as_bytes())
}

/// A sampling set file is a JSON array of 0-based vertex ids.
pub fn parse_sampling_set(text: &str, n: usize) -> Result<SamplingSet> {
    let ids: Vec<usize> = serde_json::from_str(text)?;
    SamplingSet::new(ids, n)
}

pub fn read_sampling_set(path: &Path, n: usize) -> Result<SamplingSet> {
    parse_sampling_set(&read_to_string(path)?, n)
}

pub fn sampling_set_to_json(set: &SamplingSet) -> Result<String> {
    Ok(serde_json::to_string(set.indices())? + "\n")
}

pub fn to_json_pretty<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

/// Writes through a temporary file in the target directory and renames it into place.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    fs::create_dir_all(dir).map_err(|e| io_error(dir, e))?;
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(|e| io_error(dir, e))?;
    tmp.write_all(bytes).map_err(|e| io_error(path, e))?;
    tmp.persist(path).map_err(|e| io_error(path, e.error))?;
    Ok(())
}
