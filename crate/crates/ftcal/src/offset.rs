//! The two offset-removal strategies that prepare a dataset for the solver:
//! mean centering and the in-situ sphere fit.
//!
//! Both produce the offset-adjusted matrices the regression consumes; which
//! one runs is decided by the estimation type.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3, Vector6};

use crate::error::{Error, Result};
use crate::model::{CenteringStats, Dataset, Wrench};
use crate::solver;

/// Smallest acceptable ratio between the extreme eigenvalues of the mapped
/// force-point covariance; below it the motion does not cover enough of the
/// force sphere to identify a center.
pub const SPHERE_COVERAGE_FLOOR: f64 = 1e-6;

/// How a raw-space offset was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OffsetMethod {
    Sphere,
    Centralized,
}

impl std::fmt::Display for OffsetMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            OffsetMethod::Sphere => f.write_str("sphere"),
            OffsetMethod::Centralized => f.write_str("centralized"),
        }
    }
}

/// A raw-space offset estimate together with its fit quality.
#[derive(Debug, Clone)]
pub struct OffsetEstimate {
    /// Offset in raw-measurement space (counts).
    pub offset: Vector6<f64>,
    pub method: OffsetMethod,
    pub source_dataset: String,
    /// Radius of the fitted force sphere (N); sphere method only.
    pub sphere_radius: Option<f64>,
    /// RMS residual of the fit: sphere-distance RMS for the sphere method.
    pub fit_rms: f64,
}

/// Offset-adjusted matrices ready for regression.
#[derive(Debug, Clone)]
pub struct RegressionData {
    /// n x 6 adjusted raw measurements.
    pub raw: DMatrix<f64>,
    /// n x 6 adjusted reference wrenches.
    pub targets: DMatrix<f64>,
    /// n x 1 extra-variable columns (temperature).
    pub extras: DMatrix<f64>,
}

/// Subtracts the column means from raw measurements, reference wrenches and
/// extra variables; the subtracted means are returned so predictions can be
/// reconstructed.
pub fn centralize(dataset: &Dataset) -> (RegressionData, CenteringStats) {
    let mut raw = dataset.raw_matrix();
    let mut targets = dataset.reference_matrix();
    let mut extras = dataset.extras_matrix();

    let center = |m: &mut DMatrix<f64>| -> DVector<f64> {
        let n = m.nrows() as f64;
        let means = DVector::from_fn(m.ncols(), |j, _| m.column(j).sum() / n);
        for j in 0..m.ncols() {
            m.column_mut(j).add_scalar_mut(-means[j]);
        }
        means
    };

    let mu_raw_v = center(&mut raw);
    let mu_ref_v = center(&mut targets);
    let mu_extras = center(&mut extras);

    let stats = CenteringStats {
        mu_raw: Vector6::from_fn(|i, _| mu_raw_v[i]),
        mu_reference: Wrench::from_vector(&Vector6::from_fn(|i, _| mu_ref_v[i])),
        mu_extras,
    };
    (RegressionData { raw, targets, extras }, stats)
}

/// Fits the raw-space offset from the sphere traced in force space by a
/// constant-magnitude gravity load under varying orientation.
///
/// Raw measurements are mapped through the workbench matrix; the force
/// components of the mapped, offset-corrected points must lie on a common
/// sphere. The center is recovered with the algebraic (Kasa) linear fit
/// `||p||^2 = 2 c'p + (rho^2 - ||c||^2)`. The sphere constrains only the
/// force channels, so the torque part of the offset is the mean torque
/// residual against the reference wrenches.
pub fn fit_sphere_offset(dataset: &Dataset, workbench: &nalgebra::Matrix6<f64>) -> Result<OffsetEstimate> {
    let n = dataset.len();
    if n < 4 {
        return Err(Error::InsufficientData { needed: 4, got: n });
    }
    let inv_workbench = workbench
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix("workbench matrix is not invertible".into()))?;

    // Mapped force points and torque residuals.
    let mut points = Vec::with_capacity(n);
    let mut torque_residual = Vector3::zeros();
    for sample in dataset.samples() {
        let mapped = workbench * sample.raw;
        points.push(Vector3::new(mapped[0], mapped[1], mapped[2]));
        let reference = sample.reference.to_vector();
        torque_residual += Vector3::new(
            mapped[3] - reference[3],
            mapped[4] - reference[4],
            mapped[5] - reference[5],
        );
    }
    torque_residual /= n as f64;

    // Coverage precondition: the point cloud must not be (nearly) coplanar.
    let centroid = points.iter().sum::<Vector3<f64>>() / n as f64;
    let mut covariance = Matrix3::zeros();
    for p in &points {
        let d = p - centroid;
        covariance += d * d.transpose();
    }
    covariance /= n as f64;
    let eig = covariance.symmetric_eigen().eigenvalues;
    let (lo, hi) = (eig.min(), eig.max());
    if !(hi > 0.0) || lo < SPHERE_COVERAGE_FLOOR * hi {
        return Err(Error::DegenerateGeometry(format!(
            "force points do not cover a sphere patch (eigenvalue ratio {:.3e})",
            if hi > 0.0 { lo / hi } else { 0.0 }
        )));
    }

    // Kasa fit: solve [2p', 1] [c; e] = ||p||^2 in least squares.
    let design = DMatrix::from_fn(n, 4, |i, j| if j < 3 { 2.0 * points[i][j] } else { 1.0 });
    let rhs = DVector::from_fn(n, |i, _| points[i].norm_squared());
    let svd = design.clone().svd(true, true);
    let sol = svd
        .solve(&rhs, 1e-12)
        .map_err(|e| Error::DegenerateGeometry(e.to_string()))?;
    let center = Vector3::new(sol[0], sol[1], sol[2]);
    let radius_sq = sol[3] + center.norm_squared();
    if !(radius_sq > 0.0) {
        return Err(Error::DegenerateGeometry(
            "sphere fit produced a non-positive radius".into(),
        ));
    }
    let radius = radius_sq.sqrt();

    let fit_rms = {
        let ss: f64 = points
            .iter()
            .map(|p| {
                let d = (p - center).norm() - radius;
                d * d
            })
            .sum();
        (ss / n as f64).sqrt()
    };

    // Wrench-space offset [center; torque residual], mapped back to raw space.
    let wrench_offset = Vector6::new(
        center[0],
        center[1],
        center[2],
        torque_residual[0],
        torque_residual[1],
        torque_residual[2],
    );
    let offset = inv_workbench * wrench_offset;

    Ok(OffsetEstimate {
        offset,
        method: OffsetMethod::Sphere,
        source_dataset: dataset.name.clone(),
        sphere_radius: Some(radius),
        fit_rms,
    })
}

/// Subtracts a raw-space offset from every raw measurement. Reference
/// wrenches and extra variables pass through unchanged.
pub fn apply_offset(dataset: &Dataset, estimate: &OffsetEstimate) -> RegressionData {
    let mut raw = dataset.raw_matrix();
    for j in 0..6 {
        raw.column_mut(j).add_scalar_mut(-estimate.offset[j]);
    }
    RegressionData {
        raw,
        targets: dataset.reference_matrix(),
        extras: dataset.extras_matrix(),
    }
}

/// Convenience: drops the extra columns from regression data, for estimation
/// types that ignore temperature.
pub fn without_extras(data: RegressionData) -> RegressionData {
    let n = data.raw.nrows();
    RegressionData {
        raw: data.raw,
        targets: data.targets,
        extras: DMatrix::zeros(n, 0),
    }
}

/// Builds a solver input from offset-adjusted data and a config.
pub fn regression_input(
    data: RegressionData,
    config: &crate::model::EstimationConfig,
) -> solver::RegressionInput {
    let m = data.extras.ncols();
    let workbench_extra = if config.workbench_extra.ncols() == m {
        config.workbench_extra.clone()
    } else {
        DMatrix::zeros(6, m)
    };
    solver::RegressionInput::new(data.raw, data.targets, data.extras, config.lambda)
        .with_workbench(config.workbench, workbench_extra)
        .regularize_extras(config.regularize_extras)
}
