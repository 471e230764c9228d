//! Validation metrics, the estimation-type x lambda sweep and its report
//! rendering.

use crate::error::{Error, Result};
use crate::model::{CalibrationModel, Dataset, EstimationConfig, EstimationType};
use crate::offset::{fit_sphere_offset, OffsetEstimate};
use crate::pipeline::{calibrate, CalibrationOutcome, OffsetSource};

use nalgebra::Matrix6;

/// The 13-value regularization schedule swept by default.
pub const LAMBDA_SCHEDULE: [f64; 13] = [
    0.0, 1.0, 5.0, 10.0, 50.0, 100.0, 1000.0, 5000.0, 10000.0, 50000.0, 1e5, 5e5, 1e6,
];

/// Axis labels in report order.
pub const AXIS_NAMES: [&str; 6] = ["fx", "fy", "fz", "tx", "ty", "tz"];

/// Per-axis error statistics of a model on a dataset. Forces in N (mse in
/// N^2), torques in N*m.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisMetrics {
    pub mse: [f64; 6],
    pub mean_abs_residual: [f64; 6],
    /// Mean Euclidean norm of the force-component residual, N.
    pub residual_norm_mean: f64,
}

/// Shared residual evaluation: residual = prediction - reference.
fn evaluate(model: &CalibrationModel, dataset: &Dataset) -> Result<AxisMetrics> {
    let n = dataset.len() as f64;
    let mut mse = [0.0; 6];
    let mut mean_abs = [0.0; 6];
    let mut norm_sum = 0.0;
    for sample in dataset.samples() {
        let extras = model.extras_from_sample(sample)?;
        let predicted = model.predict(&sample.raw, &extras)?;
        let residual = predicted.to_vector() - sample.reference.to_vector();
        for axis in 0..6 {
            mse[axis] += residual[axis] * residual[axis];
            mean_abs[axis] += residual[axis].abs();
        }
        norm_sum += (residual[0] * residual[0] + residual[1] * residual[1]
            + residual[2] * residual[2])
            .sqrt();
    }
    for axis in 0..6 {
        mse[axis] /= n;
        mean_abs[axis] /= n;
    }
    Ok(AxisMetrics {
        mse,
        mean_abs_residual: mean_abs,
        residual_norm_mean: norm_sum / n,
    })
}

/// Mean squared prediction error of each axis.
pub fn mse_per_axis(model: &CalibrationModel, dataset: &Dataset) -> Result<AxisMetrics> {
    evaluate(model, dataset)
}

/// Percentage of error reduction obtained by temperature compensation:
/// `(mse_no_t - mse_t) / mse_no_t * 100`. Negative when temperature hurts.
pub fn mse_reduction_percent(mse_no_t: f64, mse_t: f64) -> Result<f64> {
    if !(mse_no_t > 0.0) {
        return Err(Error::UndefinedBaseline);
    }
    Ok((mse_no_t - mse_t) / mse_no_t * 100.0)
}

/// External-force proxy on a no-contact validation set: the residual between
/// the calibrated measurement and the reference model wrench, which is zero
/// for a perfect sensor. Lower is better.
pub fn residual_wrench(model: &CalibrationModel, dataset: &Dataset) -> Result<AxisMetrics> {
    evaluate(model, dataset)
}

/// One sweep cell identifier.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SweepEntry {
    Estimation {
        estimation_type: EstimationType,
        lambda: f64,
    },
    Workbench,
}

/// One sweep report row: a cell plus its validation metrics, or the error
/// class that made the cell fail.
#[derive(Debug, Clone)]
pub struct SweepRow {
    pub dataset: String,
    pub entry: SweepEntry,
    pub metrics: Option<AxisMetrics>,
    /// "ok" or a short error class.
    pub status: String,
}

/// Grid of validation metrics over estimation types and lambda values, plus
/// one workbench baseline row per calibration dataset.
#[derive(Debug, Clone)]
pub struct SweepReport {
    pub rows: Vec<SweepRow>,
}

/// Sweep configuration: which estimation types and penalties to run, and the
/// workbench context they share.
#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub types: Vec<EstimationType>,
    pub lambdas: Vec<f64>,
    pub workbench: Matrix6<f64>,
    /// Dataset the sphere offset is fitted on; defaults to the first
    /// calibration dataset and is reused by every sphere-type cell.
    pub offset_data: Option<Dataset>,
    pub regularize_extras: bool,
}

impl SweepConfig {
    pub fn new(workbench: Matrix6<f64>) -> Self {
        Self {
            types: EstimationType::ALL.to_vec(),
            lambdas: LAMBDA_SCHEDULE.to_vec(),
            workbench,
            offset_data: None,
            regularize_extras: false,
        }
    }
}

/// Winner of one axis in a sweep report.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisBest {
    pub axis: usize,
    pub dataset: String,
    pub estimation_type: EstimationType,
    pub lambda: f64,
    /// Mean absolute residual of the winning cell on this axis.
    pub value: f64,
}

/// Runs the full pipeline for every (dataset, estimation type, lambda) cell
/// and appends a workbench baseline row per dataset. Cell failures are
/// recorded in-row and never abort the sweep.
pub fn run_sweep(
    calibration_data: &[Dataset],
    validation_data: &Dataset,
    config: &SweepConfig,
) -> Result<SweepReport> {
    if calibration_data.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    if config.types.is_empty() || config.lambdas.is_empty() {
        return Err(Error::Parameter("sweep needs at least one type and one lambda".into()));
    }

    // The sphere offset is estimated once and reused by every sphere cell.
    let sphere_offset: Option<Result<OffsetEstimate>> =
        if config.types.iter().any(|t| t.uses_sphere_offset()) {
            let offset_ds = config.offset_data.as_ref().unwrap_or(&calibration_data[0]);
            Some(fit_sphere_offset(offset_ds, &config.workbench))
        } else {
            None
        };

    let mut rows = Vec::new();
    for dataset in calibration_data {
        for &ty in &config.types {
            for &lambda in &config.lambdas {
                let entry = SweepEntry::Estimation {
                    estimation_type: ty,
                    lambda,
                };
                let cell = run_cell(dataset, validation_data, ty, lambda, config, &sphere_offset);
                let row = match cell {
                    Ok(metrics) => SweepRow {
                        dataset: dataset.name.clone(),
                        entry,
                        metrics: Some(metrics),
                        status: "ok".into(),
                    },
                    Err(e) => SweepRow {
                        dataset: dataset.name.clone(),
                        entry,
                        metrics: None,
                        status: e.class().into(),
                    },
                };
                rows.push(row);
            }
        }
        let baseline = CalibrationModel::from_workbench(config.workbench);
        let row = match evaluate(&baseline, validation_data) {
            Ok(metrics) => SweepRow {
                dataset: dataset.name.clone(),
                entry: SweepEntry::Workbench,
                metrics: Some(metrics),
                status: "ok".into(),
            },
            Err(e) => SweepRow {
                dataset: dataset.name.clone(),
                entry: SweepEntry::Workbench,
                metrics: None,
                status: e.class().into(),
            },
        };
        rows.push(row);
    }
    Ok(SweepReport { rows })
}

fn run_cell(
    dataset: &Dataset,
    validation: &Dataset,
    ty: EstimationType,
    lambda: f64,
    config: &SweepConfig,
    sphere_offset: &Option<Result<OffsetEstimate>>,
) -> Result<AxisMetrics> {
    let mut estimation = EstimationConfig::new(ty, lambda, config.workbench)?;
    estimation.regularize_extras = config.regularize_extras;
    let outcome: CalibrationOutcome = if ty.uses_sphere_offset() {
        let est = match sphere_offset {
            Some(Ok(est)) => est,
            Some(Err(e)) => {
                return Err(match e {
                    Error::DegenerateGeometry(msg) => Error::DegenerateGeometry(msg.clone()),
                    Error::SingularMatrix(msg) => Error::SingularMatrix(msg.clone()),
                    other => Error::Data(other.to_string()),
                })
            }
            None => unreachable!("sphere offset precomputed for sphere types"),
        };
        calibrate(
            std::slice::from_ref(dataset),
            OffsetSource::Precomputed(est),
            &estimation,
        )?
    } else {
        calibrate(
            std::slice::from_ref(dataset),
            OffsetSource::FirstDataset,
            &estimation,
        )?
    };
    evaluate(&outcome.model, validation)
}

/// The winning (type, lambda) per axis by mean absolute residual, over the
/// successful estimation cells. Ties break toward the smaller lambda, then
/// the estimation-type order SnT < SwT < CnT < CwT, then row order.
pub fn best_by_axis(report: &SweepReport) -> Option<[AxisBest; 6]> {
    let mut best: [Option<AxisBest>; 6] = Default::default();
    for row in &report.rows {
        let SweepEntry::Estimation {
            estimation_type,
            lambda,
        } = row.entry
        else {
            continue;
        };
        let Some(metrics) = &row.metrics else { continue };
        for axis in 0..6 {
            let value = metrics.mean_abs_residual[axis];
            let candidate = AxisBest {
                axis,
                dataset: row.dataset.clone(),
                estimation_type,
                lambda,
                value,
            };
            let replace = match &best[axis] {
                None => true,
                Some(cur) => {
                    (value, lambda, estimation_type as usize)
                        < (cur.value, cur.lambda, cur.estimation_type as usize)
                }
            };
            if replace {
                best[axis] = Some(candidate);
            }
        }
    }
    if best.iter().all(|b| b.is_some()) {
        Some(best.map(|b| b.expect("checked above")))
    } else {
        None
    }
}

/// The successful estimation row with the smallest mean force-residual norm.
pub fn best_overall(report: &SweepReport) -> Option<&SweepRow> {
    report
        .rows
        .iter()
        .filter(|r| matches!(r.entry, SweepEntry::Estimation { .. }))
        .filter(|r| r.metrics.is_some())
        .min_by(|a, b| {
            let (ka, kb) = (row_order_key(a), row_order_key(b));
            ka.partial_cmp(&kb).expect("metrics are finite")
        })
}

fn row_order_key(row: &SweepRow) -> (f64, f64, usize) {
    let SweepEntry::Estimation {
        estimation_type,
        lambda,
    } = row.entry
    else {
        unreachable!("workbench rows filtered out");
    };
    let norm = row
        .metrics
        .as_ref()
        .map(|m| m.residual_norm_mean)
        .unwrap_or(f64::INFINITY);
    (norm, lambda, estimation_type as usize)
}

fn entry_label(entry: &SweepEntry) -> (String, String) {
    match entry {
        SweepEntry::Estimation {
            estimation_type,
            lambda,
        } => (estimation_type.to_string(), crate::io::format_float(*lambda)),
        SweepEntry::Workbench => ("Workbench".into(), String::new()),
    }
}

/// Fixed-column CSV rendering of a report:
/// `dataset,type,lambda,fx_mse,...,tz_mse,force_norm_mean,status`.
pub fn report_to_csv(report: &SweepReport) -> String {
    let mut out = String::from(
        "dataset,type,lambda,fx_mse,fy_mse,fz_mse,tx_mse,ty_mse,tz_mse,force_norm_mean,status\n",
    );
    for row in &report.rows {
        let (ty, lambda) = entry_label(&row.entry);
        out.push_str(&row.dataset);
        out.push(',');
        out.push_str(&ty);
        out.push(',');
        out.push_str(&lambda);
        match &row.metrics {
            Some(m) => {
                for axis in 0..6 {
                    out.push(',');
                    out.push_str(&crate::io::format_float(m.mse[axis]));
                }
                out.push(',');
                out.push_str(&crate::io::format_float(m.residual_norm_mean));
            }
            None => out.push_str(",,,,,,,"),
        }
        out.push(',');
        out.push_str(&row.status);
        out.push('\n');
    }
    out
}

/// Aligned plain-text table of mean force-residual norms, one line per
/// (dataset, type) and one column per lambda. The workbench baseline repeats
/// its value across the lambda columns.
pub fn report_to_text(report: &SweepReport) -> String {
    let mut lambdas: Vec<f64> = Vec::new();
    for row in &report.rows {
        if let SweepEntry::Estimation { lambda, .. } = row.entry {
            if !lambdas.contains(&lambda) {
                lambdas.push(lambda);
            }
        }
    }

    // Group rows by (dataset, type) in first-seen order.
    let mut groups: Vec<(String, String, Vec<Option<String>>)> = Vec::new();
    for row in &report.rows {
        match row.entry {
            SweepEntry::Estimation {
                estimation_type,
                lambda,
            } => {
                let ty = estimation_type.to_string();
                let idx = lambdas.iter().position(|&l| l == lambda).expect("collected");
                if groups
                    .last()
                    .map(|(d, t, _)| d != &row.dataset || t != &ty)
                    .unwrap_or(true)
                {
                    groups.push((row.dataset.clone(), ty, vec![None; lambdas.len()]));
                }
                let cell = row
                    .metrics
                    .as_ref()
                    .map(|m| format!("{:.4}", m.residual_norm_mean))
                    .unwrap_or_else(|| row.status.clone());
                groups.last_mut().expect("pushed above").2[idx] = Some(cell);
            }
            SweepEntry::Workbench => {
                let cell = row
                    .metrics
                    .as_ref()
                    .map(|m| format!("{:.4}", m.residual_norm_mean))
                    .unwrap_or_else(|| row.status.clone());
                groups.push((
                    row.dataset.clone(),
                    "Workbench".into(),
                    vec![Some(cell); lambdas.len()],
                ));
            }
        }
    }

    let label_width = groups
        .iter()
        .map(|(d, t, _)| d.len() + t.len() + 1)
        .chain(std::iter::once("data + type".len()))
        .max()
        .unwrap_or(12);
    let col_width = lambdas
        .iter()
        .map(|&l| crate::io::format_float(l).len())
        .max()
        .unwrap_or(6)
        .max(9);

    let mut out = String::new();
    out.push_str("mean force-residual norm (N) by lambda\n");
    out.push_str(&format!("{:<label_width$}", "data + type"));
    for &l in &lambdas {
        out.push_str(&format!(" {:>col_width$}", crate::io::format_float(l)));
    }
    out.push('\n');
    for (dataset, ty, cells) in &groups {
        out.push_str(&format!("{:<label_width$}", format!("{dataset} {ty}")));
        for cell in cells {
            out.push_str(&format!(
                " {:>col_width$}",
                cell.as_deref().unwrap_or("-")
            ));
        }
        out.push('\n');
    }
    out
}
