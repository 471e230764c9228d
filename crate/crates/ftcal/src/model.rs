//! Domain types shared by every other module: wrenches, raw samples, datasets,
//! calibration models and estimation configurations.
//!
//! All types are immutable after construction and safe to share between
//! concurrent readers.

use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector, Matrix6, Vector3, Vector6};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Plausible temperature bounds for ingestion, degrees Celsius.
pub const TEMPERATURE_BOUNDS: (f64, f64) = (-20.0, 120.0);

/// A 6D force: three force components (N) and three torque components (N·m).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn new(force: Vector3<f64>, torque: Vector3<f64>) -> Self {
        Self { force, torque }
    }

    pub fn zero() -> Self {
        Self {
            force: Vector3::zeros(),
            torque: Vector3::zeros(),
        }
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self {
            force: Vector3::new(v[0], v[1], v[2]),
            torque: Vector3::new(v[3], v[4], v[5]),
        }
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.force[0],
            self.force[1],
            self.force[2],
            self.torque[0],
            self.torque[1],
            self.torque[2],
        )
    }

    pub fn is_finite(&self) -> bool {
        self.force.iter().chain(self.torque.iter()).all(|x| x.is_finite())
    }
}

/// One dataset row: a timestamped raw gauge reading with its temperature and
/// the reference wrench predicted by the load model.
#[derive(Debug, Clone, PartialEq)]
pub struct RawSample {
    /// Seconds since dataset start.
    pub time: f64,
    /// Raw gauge readings, dimensionless counts.
    pub raw: Vector6<f64>,
    /// Degrees Celsius.
    pub temperature: f64,
    /// Reference load expressed in the sensor frame.
    pub reference: Wrench,
}

impl RawSample {
    pub fn new(time: f64, raw: Vector6<f64>, temperature: f64, reference: Wrench) -> Result<Self> {
        if !time.is_finite() || !raw.iter().all(|x| x.is_finite()) {
            return Err(Error::Data("non-finite raw sample entry".into()));
        }
        if !reference.is_finite() {
            return Err(Error::Data("non-finite reference wrench".into()));
        }
        if !temperature.is_finite()
            || temperature < TEMPERATURE_BOUNDS.0
            || temperature > TEMPERATURE_BOUNDS.1
        {
            return Err(Error::Data(format!(
                "temperature {temperature} outside plausible bounds [{}, {}] C",
                TEMPERATURE_BOUNDS.0, TEMPERATURE_BOUNDS.1
            )));
        }
        Ok(Self {
            time,
            raw,
            temperature,
            reference,
        })
    }
}

/// Motion archetype (or provenance) of a dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DatasetKind {
    Grid,
    Balancing,
    Random,
    Combined,
    Custom,
}

impl fmt::Display for DatasetKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            DatasetKind::Grid => "grid",
            DatasetKind::Balancing => "balancing",
            DatasetKind::Random => "random",
            DatasetKind::Combined => "combined",
            DatasetKind::Custom => "custom",
        };
        f.write_str(s)
    }
}

impl FromStr for DatasetKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(DatasetKind::Grid),
            "balancing" => Ok(DatasetKind::Balancing),
            "random" => Ok(DatasetKind::Random),
            "combined" => Ok(DatasetKind::Combined),
            "custom" => Ok(DatasetKind::Custom),
            other => Err(Error::Parameter(format!("unknown dataset kind '{other}'"))),
        }
    }
}

/// An ordered, validated collection of raw samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    samples: Vec<RawSample>,
    pub kind: DatasetKind,
    pub name: String,
}

impl Dataset {
    /// Validates the dataset invariants: non-empty and non-decreasing time.
    /// Per-sample invariants are enforced by [`RawSample::new`].
    pub fn new(samples: Vec<RawSample>, kind: DatasetKind, name: impl Into<String>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::InsufficientData { needed: 1, got: 0 });
        }
        for pair in samples.windows(2) {
            if pair[1].time < pair[0].time {
                return Err(Error::Data(format!(
                    "time must be non-decreasing: {} followed by {}",
                    pair[0].time, pair[1].time
                )));
            }
        }
        Ok(Self {
            samples,
            kind,
            name: name.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    pub fn samples(&self) -> &[RawSample] {
        &self.samples
    }

    /// n x 6 matrix with one raw measurement per row.
    pub fn raw_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), 6, |i, j| self.samples[i].raw[j])
    }

    /// n x 6 matrix with one reference wrench per row.
    pub fn reference_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), 6, |i, j| self.samples[i].reference.to_vector()[j])
    }

    /// n x 1 matrix of extra linear variables; currently the temperature column.
    pub fn extras_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_fn(self.len(), 1, |i, _| self.samples[i].temperature)
    }

    /// (min, max) temperature observed in the dataset.
    pub fn temperature_range(&self) -> (f64, f64) {
        let mut lo = f64::INFINITY;
        let mut hi = f64::NEG_INFINITY;
        for s in &self.samples {
            lo = lo.min(s.temperature);
            hi = hi.max(s.temperature);
        }
        (lo, hi)
    }
}

/// How the offset is estimated and whether temperature enters the regression.
///
/// The declaration order doubles as the tie-break order used by sweep
/// reports.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EstimationType {
    /// Sphere-fit offset, no temperature term.
    SnT,
    /// Sphere-fit offset, with temperature term.
    SwT,
    /// Mean-centering offset, no temperature term.
    CnT,
    /// Mean-centering offset, with temperature term.
    CwT,
}

impl EstimationType {
    pub const ALL: [EstimationType; 4] = [
        EstimationType::SnT,
        EstimationType::SwT,
        EstimationType::CnT,
        EstimationType::CwT,
    ];

    pub fn with_temperature(&self) -> bool {
        matches!(self, EstimationType::SwT | EstimationType::CwT)
    }

    pub fn uses_sphere_offset(&self) -> bool {
        matches!(self, EstimationType::SnT | EstimationType::SwT)
    }
}

impl fmt::Display for EstimationType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EstimationType::SnT => "SnT",
            EstimationType::SwT => "SwT",
            EstimationType::CnT => "CnT",
            EstimationType::CwT => "CwT",
        };
        f.write_str(s)
    }
}

impl FromStr for EstimationType {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "SnT" => Ok(EstimationType::SnT),
            "SwT" => Ok(EstimationType::SwT),
            "CnT" => Ok(EstimationType::CnT),
            "CwT" => Ok(EstimationType::CwT),
            other => Err(Error::Parameter(format!(
                "unknown estimation type '{other}' (expected SnT, SwT, CnT or CwT)"
            ))),
        }
    }
}

/// Recipe for a single calibration solve.
#[derive(Debug, Clone)]
pub struct EstimationConfig {
    pub estimation_type: EstimationType,
    /// Regularization strength toward the workbench matrix; must be >= 0.
    pub lambda: f64,
    /// Workbench calibration matrix, the regularization target.
    pub workbench: Matrix6<f64>,
    /// Workbench coefficients for the extra variables (6 x m, zero when the
    /// previous calibration carries no such information).
    pub workbench_extra: DMatrix<f64>,
    /// When false, extra-variable coefficients are left unregularized.
    pub regularize_extras: bool,
}

impl EstimationConfig {
    pub fn new(estimation_type: EstimationType, lambda: f64, workbench: Matrix6<f64>) -> Result<Self> {
        if !lambda.is_finite() || lambda < 0.0 {
            return Err(Error::Parameter(format!(
                "lambda must be finite and non-negative, got {lambda}"
            )));
        }
        let m = usize::from(estimation_type.with_temperature());
        Ok(Self {
            estimation_type,
            lambda,
            workbench,
            workbench_extra: DMatrix::zeros(6, m),
            regularize_extras: false,
        })
    }
}

/// Means subtracted by the centralized offset-removal path.
#[derive(Debug, Clone, PartialEq)]
pub struct CenteringStats {
    pub mu_raw: Vector6<f64>,
    pub mu_reference: Wrench,
    pub mu_extras: DVector<f64>,
}

/// Metadata recorded with an estimated calibration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
pub struct ModelMetadata {
    pub estimation_type: Option<EstimationType>,
    pub lambda: Option<f64>,
    pub source_datasets: Vec<String>,
    /// (min, max) temperature seen while estimating, degrees Celsius.
    pub temperature_range: Option<(f64, f64)>,
}

/// The estimated sensor model: wrench = C * (raw - o) + Ct * extras.
///
/// The offset is stored in raw-measurement space; a wrench-side offset `b`
/// is equivalent via `b = -C * o`.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationModel {
    calibration: Matrix6<f64>,
    offset: Vector6<f64>,
    extra_coefficients: DMatrix<f64>,
    extra_variable_names: Vec<String>,
    pub metadata: ModelMetadata,
}

impl CalibrationModel {
    pub fn new(
        calibration: Matrix6<f64>,
        offset: Vector6<f64>,
        extra_coefficients: DMatrix<f64>,
        extra_variable_names: Vec<String>,
        metadata: ModelMetadata,
    ) -> Result<Self> {
        if !calibration.iter().all(|x| x.is_finite())
            || !offset.iter().all(|x| x.is_finite())
            || !extra_coefficients.iter().all(|x| x.is_finite())
        {
            return Err(Error::Data("non-finite calibration model entry".into()));
        }
        if extra_coefficients.nrows() != 6 {
            return Err(Error::Dimension {
                context: "extra coefficient rows",
                expected: 6,
                actual: extra_coefficients.nrows(),
            });
        }
        if extra_variable_names.len() != extra_coefficients.ncols() {
            return Err(Error::Dimension {
                context: "extra variable names",
                expected: extra_coefficients.ncols(),
                actual: extra_variable_names.len(),
            });
        }
        Ok(Self {
            calibration,
            offset,
            extra_coefficients,
            extra_variable_names,
            metadata,
        })
    }

    /// The model a manufacturer workbench calibration corresponds to:
    /// the given matrix with zero offset and no extra variables.
    pub fn from_workbench(workbench: Matrix6<f64>) -> Self {
        Self {
            calibration: workbench,
            offset: Vector6::zeros(),
            extra_coefficients: DMatrix::zeros(6, 0),
            extra_variable_names: Vec::new(),
            metadata: ModelMetadata::default(),
        }
    }

    pub fn calibration(&self) -> &Matrix6<f64> {
        &self.calibration
    }

    pub fn offset(&self) -> &Vector6<f64> {
        &self.offset
    }

    pub fn extra_coefficients(&self) -> &DMatrix<f64> {
        &self.extra_coefficients
    }

    pub fn extra_variable_names(&self) -> &[String] {
        &self.extra_variable_names
    }

    /// Number of extra linear variables.
    pub fn m(&self) -> usize {
        self.extra_coefficients.ncols()
    }

    /// Evaluates wrench = C * (raw - o) + Ct * extras.
    pub fn predict(&self, raw: &Vector6<f64>, extras: &[f64]) -> Result<Wrench> {
        if extras.len() != self.m() {
            return Err(Error::Dimension {
                context: "extra variables in predict",
                expected: self.m(),
                actual: extras.len(),
            });
        }
        let mut out = self.calibration * (raw - self.offset);
        for (k, value) in extras.iter().enumerate() {
            out += self.extra_coefficients.column(k) * *value;
        }
        Ok(Wrench::from_vector(&out))
    }

    /// Extra-variable values a dataset sample provides for this model:
    /// the temperature when the model carries one extra variable, nothing
    /// when it carries none.
    pub fn extras_from_sample(&self, sample: &RawSample) -> Result<Vec<f64>> {
        match self.m() {
            0 => Ok(Vec::new()),
            1 => Ok(vec![sample.temperature]),
            m => Err(Error::Dimension {
                context: "extra variables provided by dataset",
                expected: m,
                actual: 1,
            }),
        }
    }
}
