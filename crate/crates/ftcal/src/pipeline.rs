//! End-to-end estimation: offset removal, regression and model assembly for
//! one estimation configuration.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::model::{CalibrationModel, Dataset, EstimationConfig, ModelMetadata};
use crate::offset::{
    apply_offset, centralize, fit_sphere_offset, regression_input, without_extras, OffsetEstimate,
};
use crate::solver::{solve_vectorized, SolveDiagnostics};
use crate::synth::combine;

/// Where the sphere-method offset comes from.
#[derive(Debug, Clone, Copy)]
pub enum OffsetSource<'a> {
    /// Fit the offset on the first calibration dataset (the default
    /// protocol for combined calibrations).
    FirstDataset,
    /// Fit the offset on a dedicated dataset.
    Dataset(&'a Dataset),
    /// Reuse an offset estimated earlier.
    Precomputed(&'a OffsetEstimate),
}

/// A calibrated model plus the numerical context it was produced in.
#[derive(Debug, Clone)]
pub struct CalibrationOutcome {
    pub model: CalibrationModel,
    pub diagnostics: SolveDiagnostics,
    /// Present for sphere-offset estimation types.
    pub offset_estimate: Option<OffsetEstimate>,
}

/// Runs the full estimation pipeline on one or more calibration datasets.
/// Multiple datasets are combined before solving.
pub fn calibrate(
    datasets: &[Dataset],
    offset_source: OffsetSource<'_>,
    config: &EstimationConfig,
) -> Result<CalibrationOutcome> {
    if datasets.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let combined;
    let data: &Dataset = if datasets.len() == 1 {
        &datasets[0]
    } else {
        combined = combine(datasets)?;
        &combined
    };

    let ty = config.estimation_type;
    let (adjusted, sphere_estimate, stats) = if ty.uses_sphere_offset() {
        let estimate = match offset_source {
            OffsetSource::Precomputed(e) => e.clone(),
            OffsetSource::Dataset(d) => fit_sphere_offset(d, &config.workbench)?,
            OffsetSource::FirstDataset => fit_sphere_offset(&datasets[0], &config.workbench)?,
        };
        (apply_offset(data, &estimate), Some(estimate), None)
    } else {
        let (adjusted, stats) = centralize(data);
        (adjusted, None, Some(stats))
    };

    let adjusted = if ty.with_temperature() {
        adjusted
    } else {
        without_extras(adjusted)
    };
    let solution = solve_vectorized(&regression_input(adjusted, config))?;

    let calibration = solution.calibration;
    let extra_coefficients = solution.extra_coefficients.clone();

    // Raw-space offset of the assembled model. The centralized path folds
    // the subtracted means back in: with b = mu_f - Ct * mu_x the prediction
    // C (r - mu_r) + Ct (x - mu_x) + mu_f equals C (r - o) + Ct x for
    // o = mu_r - C^-1 b.
    let offset = match (&sphere_estimate, &stats) {
        (Some(est), _) => est.offset,
        (None, Some(stats)) => {
            let inv = calibration.try_inverse().ok_or_else(|| {
                Error::SingularMatrix("estimated calibration matrix is not invertible".into())
            })?;
            let mut b = stats.mu_reference.to_vector();
            if ty.with_temperature() {
                b -= extra_coefficients.column(0) * stats.mu_extras[0];
            }
            stats.mu_raw - inv * b
        }
        (None, None) => unreachable!("one offset strategy always runs"),
    };

    let (names, ct) = if ty.with_temperature() {
        (vec!["temperature".to_string()], extra_coefficients)
    } else {
        (Vec::new(), DMatrix::zeros(6, 0))
    };

    let model = CalibrationModel::new(
        calibration,
        offset,
        ct,
        names,
        ModelMetadata {
            estimation_type: Some(ty),
            lambda: Some(config.lambda),
            source_datasets: datasets.iter().map(|d| d.name.clone()).collect(),
            temperature_range: Some(data.temperature_range()),
        },
    )?;

    Ok(CalibrationOutcome {
        model,
        diagnostics: solution.diagnostics,
        offset_estimate: sphere_estimate,
    })
}
