//! Synthetic dataset generation with known ground-truth sensor parameters.
//!
//! Reference wrenches are the gravity wrench of a suspended load observed in
//! the sensor frame while the sensor orientation follows one of three motion
//! archetypes. Raw gauge readings are synthesized by inverting the sensor
//! model, so a perfect estimator can recover the ground truth exactly:
//!
//! ```text
//! raw = C_true^-1 (f - Ct_true * t) + o_true + noise
//! ```

use nalgebra::{DMatrix, Matrix6, Quaternion, Rotation3, UnitQuaternion, Vector3, Vector6};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{
    CalibrationModel, Dataset, DatasetKind, ModelMetadata, RawSample, Wrench,
};

/// Standard gravity, m/s^2.
pub const STANDARD_GRAVITY: f64 = 9.80665;

/// Sampling period of generated datasets, seconds.
pub const SAMPLE_PERIOD: f64 = 0.1;

/// Gap inserted between sources when combining datasets, seconds.
const COMBINE_GAP: f64 = 1.0;

/// Motion archetype of a generated dataset.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MotionKind {
    /// Regular lattice of orientations with the load's lever arm held
    /// constant in the world frame; narrow angular coverage.
    Grid,
    /// Smooth wide-range orientation paths with a slowly moving lever arm.
    Balancing,
    /// Uniformly random orientations and lever arms.
    Random,
}

impl MotionKind {
    pub fn dataset_kind(&self) -> DatasetKind {
        match self {
            MotionKind::Grid => DatasetKind::Grid,
            MotionKind::Balancing => DatasetKind::Balancing,
            MotionKind::Random => DatasetKind::Random,
        }
    }
}

impl std::fmt::Display for MotionKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.dataset_kind().fmt(f)
    }
}

impl std::str::FromStr for MotionKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "grid" => Ok(MotionKind::Grid),
            "balancing" => Ok(MotionKind::Balancing),
            "random" => Ok(MotionKind::Random),
            other => Err(Error::Parameter(format!(
                "unknown motion kind '{other}' (expected grid, balancing or random)"
            ))),
        }
    }
}

/// Shape of the temperature profile between its start and end values.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RampShape {
    Linear,
    /// Exponential approach; fast initial rise that slows down, normalized so
    /// the final sample reaches the end temperature exactly.
    Saturating { time_constant: f64 },
}

/// Full recipe for a synthetic dataset.
#[derive(Debug, Clone)]
pub struct ScenarioSpec {
    pub kind: MotionKind,
    pub n: usize,
    /// Suspended mass, kg.
    pub mass: f64,
    /// m/s^2.
    pub gravity: f64,
    /// Degrees Celsius at the first and last sample.
    pub temp_start: f64,
    pub temp_end: f64,
    pub ramp: RampShape,
    pub c_true: Matrix6<f64>,
    /// Raw-space offset, counts.
    pub o_true: Vector6<f64>,
    /// Wrench drift per degree Celsius (N/C and N*m/C).
    pub ct_true: Vector6<f64>,
    /// Raw-space noise standard deviation per channel, counts.
    pub noise_sigma: [f64; 6],
    /// Time constant (s) of a first-order lag applied to the temperature the
    /// drift term sees, while the recorded temperature stays unlagged.
    /// Zero disables the stressor; never modeled by the estimator.
    pub hysteresis_lag: f64,
    /// Load position, meters, world frame.
    pub lever_arm: Vector3<f64>,
    pub seed: u64,
}

/// A plausible default sensor: calibration matrix, raw offset and
/// temperature coefficients concentrated on the z force axis.
pub fn default_sensor() -> (Matrix6<f64>, Vector6<f64>, Vector6<f64>) {
    #[rustfmt::skip]
    let c = Matrix6::new(
        0.550, 0.022, -0.014, 0.008, -0.019, 0.011,
        -0.017, 0.600, 0.021, -0.012, 0.009, -0.008,
        0.013, -0.016, 0.950, 0.018, -0.011, 0.014,
        0.0021, -0.0014, 0.0017, 0.0350, 0.0012, -0.0016,
        -0.0013, 0.0019, -0.0011, 0.0015, 0.0400, 0.0013,
        0.0016, -0.0012, 0.0014, -0.0013, 0.0011, 0.0500,
    );
    let o = Vector6::new(6.0, -4.0, 7.0, 3.0, -5.0, 2.0);
    let ct = Vector6::new(0.06, 0.09, 0.85, 0.0, 0.0, 0.0);
    (c, o, ct)
}

impl ScenarioSpec {
    pub fn new(kind: MotionKind, n: usize, seed: u64) -> Self {
        let (c_true, o_true, ct_true) = default_sensor();
        Self {
            kind,
            n,
            mass: 33.0,
            gravity: STANDARD_GRAVITY,
            temp_start: 32.0,
            temp_end: 41.2,
            ramp: RampShape::Linear,
            c_true,
            o_true,
            ct_true,
            noise_sigma: [0.0; 6],
            hysteresis_lag: 0.0,
            lever_arm: Vector3::new(0.05, -0.03, 0.12),
            seed,
        }
    }

    pub fn with_temperature(mut self, start: f64, end: f64) -> Self {
        self.temp_start = start;
        self.temp_end = end;
        self
    }

    pub fn with_ramp(mut self, ramp: RampShape) -> Self {
        self.ramp = ramp;
        self
    }

    pub fn with_mass(mut self, mass: f64) -> Self {
        self.mass = mass;
        self
    }

    pub fn with_noise(mut self, sigma: f64) -> Self {
        self.noise_sigma = [sigma; 6];
        self
    }

    pub fn with_noise_per_axis(mut self, sigma: [f64; 6]) -> Self {
        self.noise_sigma = sigma;
        self
    }

    pub fn with_truth(mut self, c: Matrix6<f64>, o: Vector6<f64>, ct: Vector6<f64>) -> Self {
        self.c_true = c;
        self.o_true = o;
        self.ct_true = ct;
        self
    }

    pub fn with_hysteresis_lag(mut self, lag: f64) -> Self {
        self.hysteresis_lag = lag;
        self
    }

    fn validate(&self) -> Result<()> {
        if self.n < 10 {
            return Err(Error::InsufficientData { needed: 10, got: self.n });
        }
        if !(self.mass > 0.0) {
            return Err(Error::Parameter(format!("mass must be positive, got {}", self.mass)));
        }
        if self.temp_end < self.temp_start {
            return Err(Error::Parameter(format!(
                "temperature must not decrease: {} -> {}",
                self.temp_start, self.temp_end
            )));
        }
        if let RampShape::Saturating { time_constant } = self.ramp {
            if !(time_constant > 0.0) {
                return Err(Error::Parameter(format!(
                    "saturating ramp needs a positive time constant, got {time_constant}"
                )));
            }
        }
        if self.hysteresis_lag < 0.0 {
            return Err(Error::Parameter("hysteresis lag must be >= 0".into()));
        }
        Ok(())
    }

    /// Temperature at normalized time s in [0, 1].
    fn temperature_at(&self, s: f64, duration: f64) -> f64 {
        let span = self.temp_end - self.temp_start;
        match self.ramp {
            RampShape::Linear => self.temp_start + span * s,
            RampShape::Saturating { time_constant } => {
                let sc = time_constant / duration.max(SAMPLE_PERIOD);
                let norm = 1.0 - (-1.0 / sc).exp();
                self.temp_start + span * (1.0 - (-s / sc).exp()) / norm
            }
        }
    }

    /// Ground truth packaged as a calibration model.
    pub fn ground_truth(&self) -> CalibrationModel {
        CalibrationModel::new(
            self.c_true,
            self.o_true,
            DMatrix::from_column_slice(6, 1, self.ct_true.as_slice()),
            vec!["temperature".into()],
            ModelMetadata {
                estimation_type: None,
                lambda: None,
                source_datasets: vec![format!("{}-{}", self.kind, self.seed)],
                temperature_range: Some((self.temp_start, self.temp_end)),
            },
        )
        .expect("ground-truth model entries are finite")
    }
}

/// Golden-ratio-like lattice stride, coprime with the cell count so the
/// permuted visit order covers every cell.
fn coprime_stride(cells: usize) -> usize {
    fn gcd(mut a: usize, mut b: usize) -> usize {
        while b != 0 {
            (a, b) = (b, a % b);
        }
        a
    }
    let mut stride = ((cells as f64 * 0.618_033_988_749_895) as usize) | 1;
    while gcd(stride, cells) != 1 {
        stride += 2;
    }
    stride.max(1)
}

/// Sensor orientation (sensor-to-world) and world-frame lever arm for sample
/// i of n.
fn pose(spec: &ScenarioSpec, rng: &mut ChaCha8Rng, i: usize, n: usize) -> (Rotation3<f64>, Vector3<f64>) {
    let s = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
    match spec.kind {
        MotionKind::Grid => {
            // Regular lattice over three Euler angles, narrow coverage.
            // The lattice is visited in a stride-permuted order so pose does
            // not correlate with the slow temperature ramp.
            let k = (n as f64).cbrt().ceil() as usize;
            let k = k.max(2);
            let cells = k * k * k;
            let visit = (i % cells) * coprime_stride(cells) % cells;
            let (iy, rem) = (visit / (k * k), visit % (k * k));
            let (ip, ir) = (rem / k, rem % k);
            let lattice = |idx: usize, half_deg: f64| {
                let frac = idx as f64 / (k - 1) as f64;
                (2.0 * frac - 1.0) * half_deg.to_radians()
            };
            let rot = Rotation3::from_euler_angles(
                lattice(ir.min(k - 1), 30.0),
                lattice(ip.min(k - 1), 40.0),
                lattice(iy.min(k - 1), 60.0),
            );
            (rot, spec.lever_arm)
        }
        MotionKind::Balancing => {
            let tau = std::f64::consts::TAU;
            let roll = 40f64.to_radians() * (tau * 2.3 * s + 1.7).sin();
            let pitch = 55f64.to_radians() * (tau * 1.7 * s + 0.9).sin();
            let yaw = 80f64.to_radians() * (tau * 0.9 * s + 0.3).sin();
            let sway = Vector3::new(
                0.05 * (tau * 1.3 * s).sin(),
                0.05 * (tau * 0.7 * s + 0.5).sin(),
                0.05 * (tau * 1.9 * s + 1.0).sin(),
            );
            (Rotation3::from_euler_angles(roll, pitch, yaw), spec.lever_arm + sway)
        }
        MotionKind::Random => {
            // Uniform rotation (Shoemake) and a lever arm jittered in a box.
            let u1: f64 = rng.random();
            let u2: f64 = rng.random();
            let u3: f64 = rng.random();
            let tau = std::f64::consts::TAU;
            let q = Quaternion::new(
                (u1.sqrt()) * (tau * u3).cos(),
                (1.0 - u1).sqrt() * (tau * u2).sin(),
                (1.0 - u1).sqrt() * (tau * u2).cos(),
                (u1.sqrt()) * (tau * u3).sin(),
            );
            let rot = UnitQuaternion::from_quaternion(q).to_rotation_matrix();
            let jitter = Vector3::new(
                rng.random_range(-0.06..0.06),
                rng.random_range(-0.06..0.06),
                rng.random_range(-0.06..0.06),
            );
            (rot, spec.lever_arm + jitter)
        }
    }
}

/// Generates a dataset and the ground truth that produced it.
pub fn generate(spec: &ScenarioSpec) -> Result<(Dataset, CalibrationModel)> {
    spec.validate()?;
    let inv_c = spec
        .c_true
        .try_inverse()
        .ok_or_else(|| Error::SingularMatrix("ground-truth calibration matrix".into()))?;

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let normal = StandardNormal;
    let n = spec.n;
    let duration = (n - 1) as f64 * SAMPLE_PERIOD;
    let gravity_world = Vector3::new(0.0, 0.0, -spec.mass * spec.gravity);

    let mut lagged = spec.temp_start;
    let mut samples = Vec::with_capacity(n);
    for i in 0..n {
        let s = if n > 1 { i as f64 / (n - 1) as f64 } else { 0.0 };
        let temperature = spec.temperature_at(s, duration);
        lagged = if i == 0 {
            temperature
        } else {
            lagged + (SAMPLE_PERIOD / (spec.hysteresis_lag + SAMPLE_PERIOD)) * (temperature - lagged)
        };

        let (rot, lever) = pose(spec, &mut rng, i, n);
        let to_sensor = rot.inverse();
        let force = to_sensor * gravity_world;
        let torque = to_sensor * lever.cross(&gravity_world);
        let wrench = Wrench::new(force, torque);

        let mut raw = inv_c * (wrench.to_vector() - spec.ct_true * lagged) + spec.o_true;
        for (j, sigma) in spec.noise_sigma.iter().enumerate() {
            if *sigma > 0.0 {
                let eps: f64 = normal.sample(&mut rng);
                raw[j] += sigma * eps;
            }
        }

        samples.push(RawSample::new(i as f64 * SAMPLE_PERIOD, raw, temperature, wrench)?);
    }

    let dataset = Dataset::new(
        samples,
        spec.kind.dataset_kind(),
        format!("{}-{}", spec.kind, spec.seed),
    )?;
    Ok((dataset, spec.ground_truth()))
}

/// Concatenates datasets in order, re-stamping time so it stays monotone
/// across source boundaries.
pub fn combine(datasets: &[Dataset]) -> Result<Dataset> {
    if datasets.is_empty() {
        return Err(Error::InsufficientData { needed: 1, got: 0 });
    }
    let mut samples = Vec::with_capacity(datasets.iter().map(|d| d.len()).sum());
    let mut offset = 0.0;
    for ds in datasets {
        let base = ds.samples()[0].time;
        let mut last = offset;
        for s in ds.samples() {
            let mut sample = s.clone();
            sample.time = offset + (s.time - base);
            last = sample.time;
            samples.push(sample);
        }
        offset = last + COMBINE_GAP;
    }
    let name = datasets
        .iter()
        .map(|d| d.name.as_str())
        .collect::<Vec<_>>()
        .join("+");
    Dataset::new(samples, DatasetKind::Combined, name)
}
