//! File formats: dataset CSV, workbench matrix CSV, calibration JSON and the
//! sweep report CSV. All writes are atomic (write-temp-then-rename) and all
//! numbers round-trip exactly.

use std::fs;
use std::io::Write;
use std::path::Path;

use nalgebra::{DMatrix, Matrix6, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::model::{CalibrationModel, Dataset, DatasetKind, ModelMetadata, RawSample, Wrench};
use crate::validate::{AxisMetrics, SweepEntry, SweepReport, SweepRow};

/// Exact dataset CSV header.
pub const DATASET_HEADER: &str = "time,r0,r1,r2,r3,r4,r5,temp,fx,fy,fz,tx,ty,tz";

/// Shortest exact decimal representation; switches to exponent notation
/// outside a readable range so values always round-trip through `parse`.
pub fn format_float(x: f64) -> String {
    if x == 0.0 {
        return "0".to_string();
    }
    let a = x.abs();
    if (1e-4..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

/// Writes bytes to a temporary file in the target directory, then renames it
/// into place. A crash mid-write never leaves a partial file behind.
pub fn atomic_write(path: &Path, contents: &[u8]) -> Result<()> {
    let dir = path.parent().filter(|p| !p.as_os_str().is_empty());
    let mut tmp = match dir {
        Some(dir) => tempfile::NamedTempFile::new_in(dir)?,
        None => tempfile::NamedTempFile::new_in(".")?,
    };
    tmp.write_all(contents)?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

// ---------------------------------------------------------------------------
// Dataset CSV
// ---------------------------------------------------------------------------

/// Serializes a dataset: `#`-prefixed metadata lines, the fixed header, then
/// one sample per line.
pub fn dataset_to_csv(dataset: &Dataset) -> String {
    let mut out = String::new();
    out.push_str(&format!("# name: {}\n", dataset.name));
    out.push_str(&format!("# kind: {}\n", dataset.kind));
    let (lo, hi) = dataset.temperature_range();
    out.push_str(&format!(
        "# temp_range: {}:{}\n",
        format_float(lo),
        format_float(hi)
    ));
    out.push_str(DATASET_HEADER);
    out.push('\n');
    for s in dataset.samples() {
        out.push_str(&format_float(s.time));
        for j in 0..6 {
            out.push(',');
            out.push_str(&format_float(s.raw[j]));
        }
        out.push(',');
        out.push_str(&format_float(s.temperature));
        let reference = s.reference.to_vector();
        for j in 0..6 {
            out.push(',');
            out.push_str(&format_float(reference[j]));
        }
        out.push('\n');
    }
    out
}

pub fn write_dataset_csv(path: &Path, dataset: &Dataset) -> Result<()> {
    atomic_write(path, dataset_to_csv(dataset).as_bytes())
}

pub fn read_dataset_csv(path: &Path) -> Result<Dataset> {
    let text = fs::read_to_string(path)?;
    let path_str = path.display().to_string();
    let mut name: Option<String> = None;
    let mut kind: Option<DatasetKind> = None;
    let mut header_seen = false;
    let mut samples = Vec::new();

    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            if header_seen {
                continue; // comments after the header are ignored
            }
            if let Some((key, value)) = comment.split_once(':') {
                match key.trim() {
                    "name" => name = Some(value.trim().to_string()),
                    "kind" => {
                        kind = Some(value.trim().parse().map_err(|e: Error| Error::Parse {
                            path: path_str.clone(),
                            line: lineno,
                            message: e.to_string(),
                        })?)
                    }
                    _ => {}
                }
            }
            continue;
        }
        if !header_seen {
            if trimmed != DATASET_HEADER {
                return Err(Error::Parse {
                    path: path_str,
                    line: lineno,
                    message: format!("expected header '{DATASET_HEADER}', found '{trimmed}'"),
                });
            }
            header_seen = true;
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 14 {
            return Err(Error::Parse {
                path: path_str,
                line: lineno,
                message: format!("expected 14 fields, found {}", fields.len()),
            });
        }
        let mut values = [0.0f64; 14];
        for (k, field) in fields.iter().enumerate() {
            values[k] = field.trim().parse().map_err(|_| Error::Parse {
                path: path_str.clone(),
                line: lineno,
                message: format!("invalid number '{field}'"),
            })?;
        }
        let raw = Vector6::from_row_slice(&values[1..7]);
        let reference = Wrench::from_vector(&Vector6::from_row_slice(&values[8..14]));
        let sample =
            RawSample::new(values[0], raw, values[7], reference).map_err(|e| Error::Parse {
                path: path_str.clone(),
                line: lineno,
                message: e.to_string(),
            })?;
        samples.push(sample);
    }

    if !header_seen {
        return Err(Error::Parse {
            path: path_str,
            line: text.lines().count(),
            message: "missing dataset header".into(),
        });
    }
    let default_name = path
        .file_stem()
        .map(|s| s.to_string_lossy().to_string())
        .unwrap_or_else(|| "dataset".to_string());
    Dataset::new(
        samples,
        kind.unwrap_or(DatasetKind::Custom),
        name.unwrap_or(default_name),
    )
}

// ---------------------------------------------------------------------------
// Workbench matrix CSV
// ---------------------------------------------------------------------------

/// Six CSV lines of six values, row-major.
pub fn workbench_to_csv(workbench: &Matrix6<f64>) -> String {
    let mut out = String::new();
    for i in 0..6 {
        for j in 0..6 {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format_float(workbench[(i, j)]));
        }
        out.push('\n');
    }
    out
}

pub fn write_workbench_csv(path: &Path, workbench: &Matrix6<f64>) -> Result<()> {
    atomic_write(path, workbench_to_csv(workbench).as_bytes())
}

pub fn read_workbench_csv(path: &Path) -> Result<Matrix6<f64>> {
    let text = fs::read_to_string(path)?;
    let path_str = path.display().to_string();
    let mut rows = Vec::new();
    for (idx, line) in text.lines().enumerate() {
        let trimmed = line.trim();
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 6 {
            return Err(Error::Parse {
                path: path_str,
                line: idx + 1,
                message: format!("expected 6 values per row, found {}", fields.len()),
            });
        }
        let mut row = [0.0f64; 6];
        for (j, field) in fields.iter().enumerate() {
            row[j] = field.trim().parse().map_err(|_| Error::Parse {
                path: path_str.clone(),
                line: idx + 1,
                message: format!("invalid number '{field}'"),
            })?;
        }
        rows.push(row);
    }
    if rows.len() != 6 {
        return Err(Error::Parse {
            path: path_str,
            line: text.lines().count(),
            message: format!("expected 6 matrix rows, found {}", rows.len()),
        });
    }
    Ok(Matrix6::from_fn(|i, j| rows[i][j]))
}

// ---------------------------------------------------------------------------
// Calibration JSON
// ---------------------------------------------------------------------------

/// On-disk calibration document. `C` and `Ct` are row-major.
#[derive(Debug, Serialize, Deserialize)]
struct CalibrationFile {
    #[serde(rename = "C")]
    c: Vec<Vec<f64>>,
    o: Vec<f64>,
    #[serde(rename = "Ct")]
    ct: Vec<Vec<f64>>,
    extra_variable_names: Vec<String>,
    metadata: ModelMetadata,
}

impl CalibrationFile {
    fn from_model(model: &CalibrationModel) -> Self {
        let c = (0..6)
            .map(|i| (0..6).map(|j| model.calibration()[(i, j)]).collect())
            .collect();
        let ct = (0..6)
            .map(|i| {
                (0..model.m())
                    .map(|k| model.extra_coefficients()[(i, k)])
                    .collect()
            })
            .collect();
        Self {
            c,
            o: model.offset().iter().copied().collect(),
            ct,
            extra_variable_names: model.extra_variable_names().to_vec(),
            metadata: model.metadata.clone(),
        }
    }

    fn into_model(self) -> Result<CalibrationModel> {
        if self.c.len() != 6 || self.c.iter().any(|row| row.len() != 6) {
            return Err(Error::Data("calibration matrix must be 6x6".into()));
        }
        if self.o.len() != 6 {
            return Err(Error::Data("offset must have 6 entries".into()));
        }
        if self.ct.len() != 6 {
            return Err(Error::Data("Ct must have 6 rows".into()));
        }
        let m = self.ct[0].len();
        if self.ct.iter().any(|row| row.len() != m) {
            return Err(Error::Data("Ct rows must have equal length".into()));
        }
        let c = Matrix6::from_fn(|i, j| self.c[i][j]);
        let o = Vector6::from_fn(|i, _| self.o[i]);
        let ct = DMatrix::from_fn(6, m, |i, k| self.ct[i][k]);
        CalibrationModel::new(c, o, ct, self.extra_variable_names, self.metadata)
    }
}

pub fn calibration_to_json(model: &CalibrationModel) -> Result<String> {
    let mut text = serde_json::to_string_pretty(&CalibrationFile::from_model(model))?;
    text.push('\n');
    Ok(text)
}

pub fn write_calibration_json(path: &Path, model: &CalibrationModel) -> Result<()> {
    atomic_write(path, calibration_to_json(model)?.as_bytes())
}

pub fn read_calibration_json(path: &Path) -> Result<CalibrationModel> {
    let text = fs::read_to_string(path)?;
    let file: CalibrationFile = serde_json::from_str(&text)?;
    file.into_model()
}

// ---------------------------------------------------------------------------
// Sweep report CSV
// ---------------------------------------------------------------------------

pub fn write_sweep_csv(path: &Path, report: &SweepReport) -> Result<()> {
    atomic_write(path, crate::validate::report_to_csv(report).as_bytes())
}

const SWEEP_HEADER: &str =
    "dataset,type,lambda,fx_mse,fy_mse,fz_mse,tx_mse,ty_mse,tz_mse,force_norm_mean,status";

/// Reads a sweep report back from its CSV form. The per-axis mean absolute
/// residuals are not part of the CSV, so loaded rows carry them as NaN;
/// renderings that only need MSE and force-norm columns work unchanged.
pub fn read_sweep_csv(path: &Path) -> Result<SweepReport> {
    let text = fs::read_to_string(path)?;
    let path_str = path.display().to_string();
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.trim() == SWEEP_HEADER => {}
        _ => {
            return Err(Error::Parse {
                path: path_str,
                line: 1,
                message: "missing sweep report header".into(),
            })
        }
    }
    let mut rows = Vec::new();
    for (idx, line) in lines {
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        let fields: Vec<&str> = trimmed.split(',').collect();
        if fields.len() != 11 {
            return Err(Error::Parse {
                path: path_str,
                line: idx + 1,
                message: format!("expected 11 fields, found {}", fields.len()),
            });
        }
        let parse_num = |s: &str| -> Result<f64> {
            s.trim().parse().map_err(|_| Error::Parse {
                path: path_str.clone(),
                line: idx + 1,
                message: format!("invalid number '{s}'"),
            })
        };
        let entry = if fields[1] == "Workbench" {
            SweepEntry::Workbench
        } else {
            SweepEntry::Estimation {
                estimation_type: fields[1].parse().map_err(|e: Error| Error::Parse {
                    path: path_str.clone(),
                    line: idx + 1,
                    message: e.to_string(),
                })?,
                lambda: parse_num(fields[2])?,
            }
        };
        let metrics = if fields[3].is_empty() {
            None
        } else {
            let mut mse = [0.0; 6];
            for axis in 0..6 {
                mse[axis] = parse_num(fields[3 + axis])?;
            }
            Some(AxisMetrics {
                mse,
                mean_abs_residual: [f64::NAN; 6],
                residual_norm_mean: parse_num(fields[9])?,
            })
        };
        rows.push(SweepRow {
            dataset: fields[0].to_string(),
            entry,
            metrics,
            status: fields[10].to_string(),
        });
    }
    Ok(SweepReport { rows })
}
