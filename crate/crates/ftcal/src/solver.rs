//! Regularized least-squares estimation of the calibration matrix together
//! with coefficients for any number of extra linear variables.
//!
//! The problem solved is
//!
//! ```text
//! [C, Ct]* = argmin  sum_i || f_i - (C r_i + Ct x_i) ||^2
//!                  + lambda ||C - Cw||^2  (+ lambda ||Ct - Ctw||^2 if requested)
//! ```
//!
//! In vectorized form the normal-equations matrix is
//! `(Ra' Ra + D) (x) I6` where `Ra = [R, X]` is the augmented design and `D`
//! holds one penalty weight per augmented column, so the 6*(6+m) system
//! splits into one (6+m)-dimensional system shared by all six axes.
//! [`solve_vectorized`] exploits that split; [`solve_per_axis`] solves each
//! axis independently from an orthogonal factorization and serves as the
//! algebraic cross-check.

use nalgebra::{DMatrix, DVector, Matrix6};

use crate::error::{Error, Result};

/// Reciprocal-condition floor below which a solve is refused.
pub const RCOND_FLOOR: f64 = 1e-12;

/// Condition estimate above which the normal-equations path hands over to an
/// orthogonal factorization of the stacked system.
pub const FALLBACK_CONDITION: f64 = 1e8;

/// Inputs of one regression: offset-adjusted raw rows, reference wrench rows,
/// extra-variable columns and the regularization recipe.
#[derive(Debug, Clone)]
pub struct RegressionInput {
    /// n x 6, one offset-adjusted raw measurement per row.
    pub raw: DMatrix<f64>,
    /// n x 6, one offset-adjusted reference wrench per row.
    pub targets: DMatrix<f64>,
    /// n x m extra linear variables (m may be 0).
    pub extras: DMatrix<f64>,
    /// Penalty strength toward the workbench coefficients.
    pub lambda: f64,
    /// Regularization target for the calibration matrix.
    pub workbench: Matrix6<f64>,
    /// Regularization target for the extra coefficients, 6 x m.
    pub workbench_extra: DMatrix<f64>,
    /// When false the extra coefficients carry zero penalty weight.
    pub regularize_extras: bool,
}

impl RegressionInput {
    pub fn new(
        raw: DMatrix<f64>,
        targets: DMatrix<f64>,
        extras: DMatrix<f64>,
        lambda: f64,
    ) -> Self {
        let m = extras.ncols();
        Self {
            raw,
            targets,
            extras,
            lambda,
            workbench: Matrix6::zeros(),
            workbench_extra: DMatrix::zeros(6, m),
            regularize_extras: false,
        }
    }

    pub fn with_workbench(mut self, workbench: Matrix6<f64>, workbench_extra: DMatrix<f64>) -> Self {
        self.workbench = workbench;
        self.workbench_extra = workbench_extra;
        self
    }

    pub fn regularize_extras(mut self, yes: bool) -> Self {
        self.regularize_extras = yes;
        self
    }

    pub fn n(&self) -> usize {
        self.raw.nrows()
    }

    pub fn m(&self) -> usize {
        self.extras.ncols()
    }

    fn validate(&self) -> Result<()> {
        let n = self.n();
        let m = self.m();
        if self.raw.ncols() != 6 {
            return Err(Error::Dimension {
                context: "raw columns",
                expected: 6,
                actual: self.raw.ncols(),
            });
        }
        if self.targets.nrows() != n || self.targets.ncols() != 6 {
            return Err(Error::Dimension {
                context: "target rows",
                expected: n,
                actual: self.targets.nrows(),
            });
        }
        if m > 0 && self.extras.nrows() != n {
            return Err(Error::Dimension {
                context: "extra-variable rows",
                expected: n,
                actual: self.extras.nrows(),
            });
        }
        if self.workbench_extra.nrows() != 6 || self.workbench_extra.ncols() != m {
            return Err(Error::Dimension {
                context: "workbench extra columns",
                expected: m,
                actual: self.workbench_extra.ncols(),
            });
        }
        if n < 6 + m {
            return Err(Error::InsufficientData { needed: 6 + m, got: n });
        }
        if !self.lambda.is_finite() || self.lambda < 0.0 {
            return Err(Error::Parameter(format!(
                "lambda must be finite and non-negative, got {}",
                self.lambda
            )));
        }
        let finite = self.raw.iter().all(|x| x.is_finite())
            && self.targets.iter().all(|x| x.is_finite())
            && self.extras.iter().all(|x| x.is_finite())
            && self.workbench.iter().all(|x| x.is_finite())
            && self.workbench_extra.iter().all(|x| x.is_finite());
        if !finite {
            return Err(Error::Data("non-finite value in regression input".into()));
        }
        Ok(())
    }

    /// 6 x (6+m) matrix of regularization targets `[Cw, Ctw]`.
    fn workbench_augmented(&self) -> DMatrix<f64> {
        let m = self.m();
        let mut out = DMatrix::zeros(6, 6 + m);
        out.view_mut((0, 0), (6, 6)).copy_from(&self.workbench);
        if m > 0 {
            out.view_mut((0, 6), (6, m)).copy_from(&self.workbench_extra);
        }
        out
    }
}

/// Diagonal regularization matrix for the vectorized system, dimension
/// `6*(6+m)` square. The first 36 diagonal entries equal lambda; the
/// remaining `6*m` equal lambda only when the extras are regularized.
#[derive(Debug, Clone, PartialEq)]
pub struct RegularizerMatrix {
    diag: DVector<f64>,
}

impl RegularizerMatrix {
    pub fn new(lambda: f64, m: usize, regularize_extras: bool) -> Self {
        let extra_weight = if regularize_extras { lambda } else { 0.0 };
        let diag = DVector::from_fn(6 * (6 + m), |i, _| {
            if i < 36 {
                lambda
            } else {
                extra_weight
            }
        });
        Self { diag }
    }

    pub fn diagonal(&self) -> &DVector<f64> {
        &self.diag
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_diagonal(&self.diag)
    }

    /// One penalty weight per augmented design column (the diagonal is
    /// constant within each column block of the vectorized unknowns).
    pub fn column_weights(&self) -> DVector<f64> {
        let cols = self.diag.len() / 6;
        DVector::from_fn(cols, |j, _| self.diag[6 * j])
    }
}

/// Which factorization produced a solution.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    /// Cholesky factorization of the shared normal equations.
    NormalEquations,
    /// QR of the stacked `[design; sqrt(D)]` system (conditioning fallback).
    StackedQr,
    /// SVD of the stacked system, one axis at a time.
    StackedSvd,
}

/// Numerical diagnostics reported with every solve.
#[derive(Debug, Clone)]
pub struct SolveDiagnostics {
    /// Condition estimate of the per-axis normal-equations block.
    pub condition_estimate: f64,
    /// Root-mean-square residual of each axis on the fitted data.
    pub residual_rms: [f64; 6],
    pub method: SolveMethod,
}

/// Result of a calibration solve.
#[derive(Debug, Clone)]
pub struct CalibrationSolution {
    pub calibration: Matrix6<f64>,
    /// 6 x m extra-variable coefficients.
    pub extra_coefficients: DMatrix<f64>,
    pub diagnostics: SolveDiagnostics,
}

/// Kronecker product `a (x) b`.
pub fn kron(a: &DMatrix<f64>, b: &DMatrix<f64>) -> DMatrix<f64> {
    let (ar, ac) = a.shape();
    let (br, bc) = b.shape();
    let mut out = DMatrix::zeros(ar * br, ac * bc);
    for i in 0..ar {
        for j in 0..ac {
            let scale = a[(i, j)];
            out.view_mut((i * br, j * bc), (br, bc))
                .copy_from(&(b * scale));
        }
    }
    out
}

/// Column-stacking vectorization of a matrix.
pub fn vec_of(m: &DMatrix<f64>) -> DVector<f64> {
    DVector::from_column_slice(m.as_slice())
}

/// Checks the identity `vec(A X B) = (B' (x) A) vec(X)` to 1e-12 relative.
/// Exposed as a test utility.
pub fn vec_kron_check(a: &DMatrix<f64>, x: &DMatrix<f64>, b: &DMatrix<f64>) -> bool {
    if a.ncols() != x.nrows() || x.ncols() != b.nrows() {
        return false;
    }
    let lhs = vec_of(&(a * x * b));
    let rhs = kron(&b.transpose(), a) * vec_of(x);
    let scale = lhs.norm().max(rhs.norm()).max(1.0);
    (lhs - rhs).norm() <= 1e-12 * scale
}

/// Column-concatenates the raw design with the extra-variable columns.
pub fn build_augmented(raw: &DMatrix<f64>, extras: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if extras.ncols() == 0 {
        return Ok(raw.clone());
    }
    if extras.nrows() != raw.nrows() {
        return Err(Error::Dimension {
            context: "augmented design rows",
            expected: raw.nrows(),
            actual: extras.nrows(),
        });
    }
    let n = raw.nrows();
    let m = extras.ncols();
    let mut out = DMatrix::zeros(n, raw.ncols() + m);
    out.view_mut((0, 0), (n, raw.ncols())).copy_from(raw);
    out.view_mut((0, raw.ncols()), (n, m)).copy_from(extras);
    Ok(out)
}

/// Eigenvalue-based condition estimate of a symmetric positive semidefinite
/// matrix. Returns (condition, rcond); a non-positive smallest eigenvalue
/// maps to rcond = 0.
fn spd_condition(m: &DMatrix<f64>) -> (f64, f64) {
    let eig = m.clone().symmetric_eigen();
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for &e in eig.eigenvalues.iter() {
        lo = lo.min(e);
        hi = hi.max(e);
    }
    if !(lo > 0.0) || hi <= 0.0 {
        return (f64::INFINITY, 0.0);
    }
    (hi / lo, lo / hi)
}

/// Stacked ridge system `[A; sqrt(D)]` and the matching stacked targets
/// `[F; sqrt(D) * Wb']`, one target column per axis.
fn stack_system(
    design: &DMatrix<f64>,
    targets: &DMatrix<f64>,
    weights: &DVector<f64>,
    workbench_aug: &DMatrix<f64>,
) -> (DMatrix<f64>, DMatrix<f64>) {
    let n = design.nrows();
    let p = design.ncols();
    let mut stacked = DMatrix::zeros(n + p, p);
    stacked.view_mut((0, 0), (n, p)).copy_from(design);
    let mut rhs = DMatrix::zeros(n + p, 6);
    rhs.view_mut((0, 0), (n, 6)).copy_from(targets);
    for j in 0..p {
        let s = weights[j].sqrt();
        stacked[(n + j, j)] = s;
        for axis in 0..6 {
            rhs[(n + j, axis)] = s * workbench_aug[(axis, j)];
        }
    }
    (stacked, rhs)
}

fn residual_rms(design: &DMatrix<f64>, targets: &DMatrix<f64>, coeffs: &DMatrix<f64>) -> [f64; 6] {
    let n = design.nrows() as f64;
    let residual = targets - design * coeffs;
    let mut out = [0.0; 6];
    for axis in 0..6 {
        out[axis] = (residual.column(axis).norm_squared() / n).sqrt();
    }
    out
}

fn split_solution(coeffs: &DMatrix<f64>, m: usize) -> (Matrix6<f64>, DMatrix<f64>) {
    // coeffs is (6+m) x 6, one column per axis; rows of [C, Ct] are its columns.
    let w = coeffs.transpose();
    let mut c = Matrix6::zeros();
    c.copy_from(&w.view((0, 0), (6, 6)));
    let ct = DMatrix::from(w.view((0, 6), (6, m)));
    (c, ct)
}

/// Solves the vectorized regularized problem by exploiting its Kronecker
/// block structure: one SPD normal-equations system shared by all axes,
/// with a stacked-QR fallback when the conditioning is poor.
pub fn solve_vectorized(input: &RegressionInput) -> Result<CalibrationSolution> {
    input.validate()?;
    let m = input.m();
    let design = build_augmented(&input.raw, &input.extras)?;
    let weights = RegularizerMatrix::new(input.lambda, m, input.regularize_extras).column_weights();
    let workbench_aug = input.workbench_augmented();

    let normal = design.tr_mul(&design) + DMatrix::from_diagonal(&weights);
    let (condition, rcond) = spd_condition(&normal);
    if rcond < RCOND_FLOOR {
        return Err(Error::IllConditioned { rcond });
    }

    let (coeffs, method) = if condition > FALLBACK_CONDITION {
        let (stacked, rhs) = stack_system(&design, &input.targets, &weights, &workbench_aug);
        let qr = stacked.qr();
        let qtb = qr.q().tr_mul(&rhs);
        let coeffs = qr
            .r()
            .solve_upper_triangular(&qtb)
            .ok_or(Error::IllConditioned { rcond })?;
        (coeffs, SolveMethod::StackedQr)
    } else {
        let rhs = design.tr_mul(&input.targets)
            + DMatrix::from_diagonal(&weights) * workbench_aug.transpose();
        let chol = normal
            .clone()
            .cholesky()
            .ok_or(Error::IllConditioned { rcond })?;
        (chol.solve(&rhs), SolveMethod::NormalEquations)
    };

    let residual_rms = residual_rms(&design, &input.targets, &coeffs);
    let (calibration, extra_coefficients) = split_solution(&coeffs, m);
    Ok(CalibrationSolution {
        calibration,
        extra_coefficients,
        diagnostics: SolveDiagnostics {
            condition_estimate: condition,
            residual_rms,
            method,
        },
    })
}

/// Solves each axis as an independent scalar-output ridge problem from an
/// SVD of the stacked system. Algebraically equivalent to
/// [`solve_vectorized`]; kept as an independent numerical route.
pub fn solve_per_axis(input: &RegressionInput) -> Result<CalibrationSolution> {
    input.validate()?;
    let m = input.m();
    let design = build_augmented(&input.raw, &input.extras)?;
    let weights = RegularizerMatrix::new(input.lambda, m, input.regularize_extras).column_weights();
    let workbench_aug = input.workbench_augmented();

    let (stacked, rhs) = stack_system(&design, &input.targets, &weights, &workbench_aug);
    let svd = stacked.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let smin = svd.singular_values.min();
    // The stacked system's squared condition matches the normal equations'.
    let condition = if smin > 0.0 {
        (smax / smin).powi(2)
    } else {
        f64::INFINITY
    };
    let rcond = if condition.is_finite() { 1.0 / condition } else { 0.0 };
    if rcond < RCOND_FLOOR {
        return Err(Error::IllConditioned { rcond });
    }

    let p = design.ncols();
    let mut coeffs = DMatrix::zeros(p, 6);
    for axis in 0..6 {
        let target = DVector::from(rhs.column(axis));
        let sol = svd
            .solve(&target, 0.0)
            .map_err(|e| Error::SingularMatrix(e.to_string()))?;
        coeffs.set_column(axis, &sol);
    }

    let residual_rms = residual_rms(&design, &input.targets, &coeffs);
    let (calibration, extra_coefficients) = split_solution(&coeffs, m);
    Ok(CalibrationSolution {
        calibration,
        extra_coefficients,
        diagnostics: SolveDiagnostics {
            condition_estimate: condition,
            residual_rms,
            method: SolveMethod::StackedSvd,
        },
    })
}
