//! In-situ calibration of six-axis force/torque sensors with temperature
//! compensation.
//!
//! The toolkit estimates a sensor's 6x6 calibration matrix, raw-space offset
//! and per-degree temperature coefficients from datasets collected with the
//! sensor mounted in its final structure, using regularized least squares
//! with the manufacturer's workbench matrix as the regularization target.
//!
//! Modules:
//!
//! - [`model`]: domain types (wrenches, datasets, calibration models).
//! - [`solver`]: the regularized vectorized least-squares solver and its
//!   per-axis cross-check route.
//! - [`offset`]: mean-centering and sphere-fit offset estimation.
//! - [`pipeline`]: offset -> solve -> model assembly for one configuration.
//! - [`validate`]: error metrics, the estimation-type x lambda sweep and
//!   report rendering.
//! - [`synth`]: synthetic dataset generation with known ground truth.
//! - [`io`]: dataset/workbench/calibration/report file formats.

pub mod error;
pub mod io;
pub mod model;
pub mod offset;
pub mod pipeline;
pub mod solver;
pub mod synth;
pub mod validate;

pub use error::{Error, Result};
