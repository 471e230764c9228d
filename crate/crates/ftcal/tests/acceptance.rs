//! Acceptance suite: one test per release criterion, each printing a
//! `acceptance NN (...): pass` line on success (visible with --nocapture).
//!
//! Run with `cargo test -p ftcal --test acceptance -- --nocapture`.

use std::time::Instant;

use nalgebra::{DMatrix, DVector, Matrix6, Vector3, Vector6};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use ftcal::model::{
    Dataset, DatasetKind, EstimationConfig, EstimationType, RawSample, Wrench,
};
use ftcal::pipeline::{calibrate, OffsetSource};
use ftcal::offset::fit_sphere_offset;
use ftcal::solver::{solve_per_axis, solve_vectorized, CalibrationSolution, RegressionInput};
use ftcal::synth::{combine, default_sensor, generate, MotionKind, ScenarioSpec};
use ftcal::validate::{
    mse_per_axis, mse_reduction_percent, run_sweep, SweepConfig, SweepEntry, LAMBDA_SCHEDULE,
};

fn dynamic(m: &Matrix6<f64>) -> DMatrix<f64> {
    DMatrix::from_column_slice(6, 6, m.as_slice())
}

fn relative(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    (a - b).norm() / b.norm().max(1e-30)
}

/// A ground truth whose offset the sphere stage recovers exactly: torque-only
/// drift keeps the force sphere clean, and a temperature profile symmetric
/// about zero keeps the mean torque residual unbiased.
fn exactly_recoverable_spec(n: usize, seed: u64) -> ScenarioSpec {
    let (c, o, _) = default_sensor();
    let ct = Vector6::new(0.0, 0.0, 0.0, 0.004, -0.006, 0.002);
    ScenarioSpec::new(MotionKind::Grid, n, seed)
        .with_temperature(-4.6, 4.6)
        .with_truth(c, o, ct)
}

/// The desk-scale stand-in for the robot experiment: a sensor whose true
/// response drifted away from the workbench matrix, carrying a z-dominant
/// temperature drift referenced to 38 C so residuals at operating
/// temperatures stay at realistic magnitudes.
fn table_v_truth() -> (Matrix6<f64>, Vector6<f64>, Vector6<f64>) {
    let (c, o_base, ct) = default_sensor();
    // Referencing the drift to 38 C keeps the workbench residual at
    // operating temperatures around the 10 N scale: the model-side constant
    // C*o - Ct*t becomes C*o_base - Ct*(t - 38).
    let reference_temp = 38.0;
    let o = o_base + c.try_inverse().expect("invertible") * (ct * reference_temp);
    (c, o, ct)
}

/// Workbench matrix: the true calibration perturbed entrywise by up to 0.3%,
/// emulating the response change a sensor picks up when mounted.
fn perturbed_workbench(c_true: &Matrix6<f64>) -> Matrix6<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(777);
    Matrix6::from_fn(|i, j| c_true[(i, j)] * (1.0 + 0.003 * rng.random_range(-1.0..1.0)))
}

#[test]
fn acceptance_01_oracle_recovery() {
    let start = Instant::now();
    let spec = exactly_recoverable_spec(1000, 42);
    let (dataset, truth) = generate(&spec).unwrap();
    let config = EstimationConfig::new(EstimationType::SwT, 0.0, spec.c_true).unwrap();
    let outcome = calibrate(
        std::slice::from_ref(&dataset),
        OffsetSource::FirstDataset,
        &config,
    )
    .unwrap();

    let dc = relative(
        &dynamic(outcome.model.calibration()),
        &dynamic(truth.calibration()),
    );
    let doff = (outcome.model.offset() - truth.offset()).norm() / truth.offset().norm();
    let dct = (outcome.model.extra_coefficients() - truth.extra_coefficients()).norm()
        / truth.extra_coefficients().norm();
    assert!(dc < 1e-6, "calibration matrix error {dc}");
    assert!(doff < 1e-6, "offset error {doff}");
    assert!(dct < 1e-6, "temperature coefficient error {dct}");

    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 1.0, "took {elapsed:?}, budget 1 s");
    println!(
        "acceptance 01 (oracle recovery, noiseless grid n=1000 SwT lambda=0): pass \
         (C {dc:.2e}, o {doff:.2e}, Ct {dct:.2e}, {elapsed:?})"
    );
}

#[test]
fn acceptance_02_kronecker_equivalence() {
    let start = Instant::now();
    let ms = [0usize, 1, 3];
    let lambdas = [0.0, 10.0, 1e6];
    let mut worst: f64 = 0.0;
    for case in 0..50u64 {
        let m = ms[(case % 3) as usize];
        let lambda = lambdas[((case / 3) % 3) as usize];
        let mut rng = ChaCha8Rng::seed_from_u64(9000 + case);
        let n = 40 + (case as usize % 4) * 17;
        let raw = DMatrix::from_fn(n, 6, |_, _| rng.random_range(-1.0..1.0));
        let extras = DMatrix::from_fn(n, m, |_, _| rng.random_range(-1.0..1.0));
        let targets = DMatrix::from_fn(n, 6, |_, _| rng.random_range(-1.0..1.0));
        let workbench = Matrix6::from_fn(|_, _| rng.random_range(-1.0..1.0));
        let workbench_extra = DMatrix::from_fn(6, m, |_, _| rng.random_range(-1.0..1.0));
        let input = RegressionInput::new(raw, targets, extras, lambda)
            .with_workbench(workbench, workbench_extra)
            .regularize_extras(case % 2 == 0);

        let a = solve_vectorized(&input).unwrap();
        let b = solve_per_axis(&input).unwrap();
        let distance = solution_gap(&a, &b);
        worst = worst.max(distance);
        assert!(
            distance < 1e-10,
            "case {case} (m={m}, lambda={lambda}): routes disagree by {distance}"
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 5.0, "took {elapsed:?}, budget 5 s");
    println!(
        "acceptance 02 (vectorized vs per-axis equivalence, 50 inputs): pass \
         (worst relative gap {worst:.2e}, {elapsed:?})"
    );
}

fn solution_gap(a: &CalibrationSolution, b: &CalibrationSolution) -> f64 {
    let dc = (dynamic(&a.calibration) - dynamic(&b.calibration)).norm();
    let dt = (&a.extra_coefficients - &b.extra_coefficients).norm();
    let scale = (dynamic(&a.calibration).norm() + a.extra_coefficients.norm()).max(1e-30);
    (dc + dt) / scale
}

#[test]
fn acceptance_03_mse_reduction_arithmetic() {
    let grid = mse_reduction_percent(6.1136, 1.7123).unwrap();
    assert!((grid - 71.99).abs() <= 0.01, "grid z reduction {grid}");
    assert!((grid - 71.0).abs() <= 1.5, "grid z reduction vs rounded value {grid}");

    let combined = mse_reduction_percent(21.5244, 6.6869).unwrap();
    assert!((combined - 68.9).abs() <= 0.05, "combined z reduction {combined}");

    println!(
        "acceptance 03 (MSE reduction arithmetic): pass (grid {grid:.2}%, combined {combined:.2}%)"
    );
}

#[test]
fn acceptance_04_sweep_shape() {
    let (c, o, ct) = table_v_truth();
    let grid = generate(
        &ScenarioSpec::new(MotionKind::Grid, 343, 51)
            .with_truth(c, o, ct)
            .with_noise(0.5),
    )
    .unwrap()
    .0;
    let balancing = generate(
        &ScenarioSpec::new(MotionKind::Balancing, 300, 52)
            .with_truth(c, o, ct)
            .with_temperature(38.1, 41.6)
            .with_noise(0.5),
    )
    .unwrap()
    .0;
    let validation = generate(
        &ScenarioSpec::new(MotionKind::Random, 200, 53)
            .with_truth(c, o, ct)
            .with_temperature(39.0, 40.5)
            .with_noise(0.5),
    )
    .unwrap()
    .0;

    let config = SweepConfig::new(perturbed_workbench(&c));
    let calibration_sets = [grid, balancing];
    let report = run_sweep(&calibration_sets, &validation, &config).unwrap();

    assert_eq!(config.types.len() * config.lambdas.len(), 52);
    assert_eq!(report.rows.len(), 2 * 53, "53 rows per dataset pairing");
    for dataset in ["grid-51", "balancing-52"] {
        let cells = report
            .rows
            .iter()
            .filter(|r| r.dataset == dataset)
            .filter(|r| matches!(r.entry, SweepEntry::Estimation { .. }))
            .count();
        let baselines = report
            .rows
            .iter()
            .filter(|r| r.dataset == dataset)
            .filter(|r| matches!(r.entry, SweepEntry::Workbench))
            .count();
        assert_eq!(cells, 52, "{dataset}: 52 calibration cells");
        assert_eq!(baselines, 1, "{dataset}: one workbench baseline row");
    }
    println!("acceptance 04 (sweep shape, 52 cells + 1 baseline per pairing): pass");
}

#[test]
fn acceptance_05_temperature_benefit_on_z_axis() {
    let start = Instant::now();
    // Drift concentrated on the z force axis, temperatures as recorded for
    // the calibration sessions (32 -> 41.2 C). The offset is fitted on a
    // short segment recorded at the session-start temperature, before the
    // warm-up; random motion varies the load's lever arm so the drift cannot
    // be soaked up by the calibration matrix alone. MSEs are training errors
    // at lambda = 0, averaged over 10 seeds.
    let (c, o, ct) = default_sensor();
    assert!(ct[2] > 0.0 && ct[3] == 0.0 && ct[4] == 0.0 && ct[5] == 0.0);

    let mut z_reduction_sum = 0.0;
    let mut torque_reduction_sum = [0.0; 3];
    let seeds = 10;
    for seed in 0..seeds {
        let offset_spec = ScenarioSpec::new(MotionKind::Random, 300, 1200 + seed)
            .with_truth(c, o, ct)
            .with_temperature(32.0, 32.0)
            .with_noise(0.5);
        let (offset_ds, _) = generate(&offset_spec).unwrap();
        let spec = ScenarioSpec::new(MotionKind::Random, 512, 1100 + seed)
            .with_truth(c, o, ct)
            .with_temperature(32.0, 41.2)
            .with_noise(0.5);
        let (dataset, _) = generate(&spec).unwrap();
        let run = |ty: EstimationType| {
            let config = EstimationConfig::new(ty, 0.0, c).unwrap();
            let outcome = calibrate(
                std::slice::from_ref(&dataset),
                OffsetSource::Dataset(&offset_ds),
                &config,
            )
            .unwrap();
            mse_per_axis(&outcome.model, &dataset).unwrap()
        };
        let no_temp = run(EstimationType::SnT);
        let with_temp = run(EstimationType::SwT);
        z_reduction_sum += mse_reduction_percent(no_temp.mse[2], with_temp.mse[2]).unwrap();
        for axis in 0..3 {
            torque_reduction_sum[axis] +=
                mse_reduction_percent(no_temp.mse[3 + axis], with_temp.mse[3 + axis]).unwrap();
        }
    }

    let z_reduction = z_reduction_sum / seeds as f64;
    assert!(
        z_reduction >= 50.0,
        "z-axis MSE reduction {z_reduction}% below 50%"
    );
    let mut torque_reductions = [0.0; 3];
    for axis in 0..3 {
        torque_reductions[axis] = torque_reduction_sum[axis] / seeds as f64;
        assert!(
            torque_reductions[axis].abs() <= 10.0,
            "torque axis {axis} MSE change {}% outside +-10%",
            torque_reductions[axis]
        );
    }
    let elapsed = start.elapsed();
    assert!(elapsed.as_secs_f64() < 30.0, "took {elapsed:?}, budget 30 s");
    println!(
        "acceptance 05 (temperature benefit on z): pass (z {z_reduction:.1}%, \
         torques [{:.2}%, {:.2}%, {:.2}%], {elapsed:?})",
        torque_reductions[0], torque_reductions[1], torque_reductions[2]
    );
}

/// Best successful estimation cell by mean force-residual norm.
fn best_cell_norm(report: &ftcal::validate::SweepReport) -> f64 {
    report
        .rows
        .iter()
        .filter(|r| matches!(r.entry, SweepEntry::Estimation { .. }))
        .filter_map(|r| r.metrics.as_ref())
        .map(|m| m.residual_norm_mean)
        .fold(f64::INFINITY, f64::min)
}

fn workbench_norm(report: &ftcal::validate::SweepReport) -> f64 {
    report
        .rows
        .iter()
        .find(|r| matches!(r.entry, SweepEntry::Workbench))
        .and_then(|r| r.metrics.as_ref())
        .map(|m| m.residual_norm_mean)
        .expect("workbench row present")
}

/// Mixed-motion validation set at the validation-session temperatures.
fn validation_mix(c: Matrix6<f64>, o: Vector6<f64>, ct: Vector6<f64>, seed: u64) -> Dataset {
    let gen = |kind, n, s| {
        generate(
            &ScenarioSpec::new(kind, n, s)
                .with_truth(c, o, ct)
                .with_temperature(39.0, 40.5)
                .with_noise(0.5),
        )
        .unwrap()
        .0
    };
    combine(&[
        gen(MotionKind::Grid, 216, seed),
        gen(MotionKind::Balancing, 200, seed + 1),
        gen(MotionKind::Random, 150, seed + 2),
    ])
    .unwrap()
}

#[test]
fn acceptance_06_combined_beats_grid_only() {
    // Mean over 10 seeds of the best swept validation force-residual norm:
    // calibrating on grid + balancing together must not lose to grid alone.
    let (c, o, ct) = table_v_truth();
    let workbench = perturbed_workbench(&c);
    let seeds = 10;
    let mut grid_best_sum = 0.0;
    let mut combined_best_sum = 0.0;
    for seed in 0..seeds {
        let base = 3000 + seed * 10;
        let (grid, _) = generate(
            &ScenarioSpec::new(MotionKind::Grid, 512, base)
                .with_truth(c, o, ct)
                .with_temperature(32.0, 41.2)
                .with_noise(0.5),
        )
        .unwrap();
        let (balancing, _) = generate(
            &ScenarioSpec::new(MotionKind::Balancing, 500, base + 1)
                .with_truth(c, o, ct)
                .with_temperature(38.1, 41.6)
                .with_noise(0.5),
        )
        .unwrap();
        let validation = validation_mix(c, o, ct, base + 2);

        let mut config = SweepConfig::new(workbench);
        config.offset_data = Some(grid.clone());

        let grid_report = run_sweep(std::slice::from_ref(&grid), &validation, &config).unwrap();
        let combined_set = combine(&[grid.clone(), balancing]).unwrap();
        let combined_report =
            run_sweep(std::slice::from_ref(&combined_set), &validation, &config).unwrap();

        grid_best_sum += best_cell_norm(&grid_report);
        combined_best_sum += best_cell_norm(&combined_report);
    }
    let grid_best = grid_best_sum / seeds as f64;
    let combined_best = combined_best_sum / seeds as f64;
    assert!(
        combined_best <= grid_best,
        "combined best {combined_best} N vs grid-only best {grid_best} N"
    );
    println!(
        "acceptance 06 (combined beats grid-only): pass \
         (combined {combined_best:.3} N <= grid {grid_best:.3} N)"
    );
}

#[test]
fn acceptance_07_regularization_limits() {
    let mut rng = ChaCha8Rng::seed_from_u64(4000);
    let n = 200;
    let raw = DMatrix::from_fn(n, 6, |_, _| rng.random_range(-1.0..1.0));
    let targets = DMatrix::from_fn(n, 6, |_, _| rng.random_range(-1.0..1.0));
    let workbench = Matrix6::from_fn(|_, _| rng.random_range(-1.0..1.0));

    let solve = |lambda: f64| {
        let input = RegressionInput::new(raw.clone(), targets.clone(), DMatrix::zeros(n, 0), lambda)
            .with_workbench(workbench, DMatrix::zeros(6, 0));
        solve_vectorized(&input).unwrap()
    };

    // Distance to the workbench is non-increasing along the schedule.
    let mut last = f64::INFINITY;
    for &lambda in LAMBDA_SCHEDULE.iter() {
        let d = (solve(lambda).calibration - workbench).norm();
        assert!(
            d <= last * (1.0 + 1e-9) + 1e-12,
            "||C - Cw|| grew from {last} to {d} at lambda {lambda}"
        );
        last = d;
    }

    // At lambda = 1e12 the solution collapses onto the workbench.
    let clamped = (solve(1e12).calibration - workbench).norm();
    assert!(
        clamped < 1e-3 * workbench.norm(),
        "residual distance {clamped} vs bound {}",
        1e-3 * workbench.norm()
    );

    // At lambda = 0 the solution matches an independent SVD least squares.
    let zero = solve(0.0);
    let svd = raw.clone().svd(true, true);
    for axis in 0..6 {
        let w = svd.solve(&DVector::from(targets.column(axis)), 1e-14).unwrap();
        for j in 0..6 {
            let got = zero.calibration[(axis, j)];
            assert!(
                (got - w[j]).abs() <= 1e-9 * w[j].abs().max(1.0),
                "axis {axis} coeff {j}: {got} vs OLS {}",
                w[j]
            );
        }
    }
    println!(
        "acceptance 07 (regularization limits): pass \
         (monotone schedule, ||C(1e12)-Cw|| = {clamped:.2e})"
    );
}

#[test]
fn acceptance_08_sphere_offset_recovery() {
    // Exact recovery on noiseless sphere data.
    let radius = 33.0 * 9.80665;
    let center = Vector3::new(4.0, -7.5, 2.25);
    let noiseless = sphere_dataset(center, radius, 200, 42, 0.0);
    let est = fit_sphere_offset(&noiseless, &Matrix6::identity()).unwrap();
    let exact_err = (Vector3::new(est.offset[0], est.offset[1], est.offset[2]) - center).norm();
    assert!(exact_err < 1e-8, "noiseless center error {exact_err}");
    assert!((est.sphere_radius.unwrap() - radius).abs() < 1e-8);

    // Monte-Carlo with sigma = 0.1 N isotropic noise over 100 seeds.
    let sigma = 0.1;
    let n = 400;
    let seeds = 100;
    let mut total = 0.0;
    for seed in 0..seeds {
        let ds = sphere_dataset(center, radius, n, 5000 + seed, sigma);
        let est = fit_sphere_offset(&ds, &Matrix6::identity()).unwrap();
        total += (Vector3::new(est.offset[0], est.offset[1], est.offset[2]) - center).norm();
    }
    let mean_error = total / seeds as f64;
    let bound = 3.0 * sigma / (n as f64).sqrt();
    assert!(
        mean_error < bound,
        "mean center error {mean_error} vs 3*sigma/sqrt(n) = {bound}"
    );
    println!(
        "acceptance 08 (sphere offset recovery): pass \
         (exact {exact_err:.2e}, noisy mean {mean_error:.4} < {bound:.4})"
    );
}

/// Force readings on a sphere (through an identity workbench), with optional
/// isotropic noise.
fn sphere_dataset(center: Vector3<f64>, radius: f64, n: usize, seed: u64, sigma: f64) -> Dataset {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let normal = StandardNormal;
    let mut draw = |scale: f64| -> f64 {
        let x: f64 = normal.sample(&mut rng);
        scale * x
    };
    let samples = (0..n)
        .map(|i| {
            let mut dir = Vector3::new(draw(1.0), draw(1.0), draw(1.0));
            dir /= dir.norm();
            let p = center + dir * radius;
            let raw = Vector6::new(
                p[0] + draw(sigma),
                p[1] + draw(sigma),
                p[2] + draw(sigma),
                0.0,
                0.0,
                0.0,
            );
            let reference = Wrench::new(p - center, Vector3::zeros());
            RawSample::new(i as f64 * 0.1, raw, 25.0, reference).unwrap()
        })
        .collect();
    Dataset::new(samples, DatasetKind::Custom, "sphere").unwrap()
}

#[test]
fn acceptance_09_calibration_halves_workbench_residual() {
    // Desk-scale stand-in for the robot validation: the best swept
    // calibration must at least halve the workbench's mean force-residual
    // norm on held-out mixed-motion data.
    let (c, o, ct) = table_v_truth();
    let workbench = perturbed_workbench(&c);
    let (grid, _) = generate(
        &ScenarioSpec::new(MotionKind::Grid, 512, 6100)
            .with_truth(c, o, ct)
            .with_temperature(32.0, 41.2)
            .with_noise(0.5),
    )
    .unwrap();
    let (balancing, _) = generate(
        &ScenarioSpec::new(MotionKind::Balancing, 500, 6101)
            .with_truth(c, o, ct)
            .with_temperature(38.1, 41.6)
            .with_noise(0.5),
    )
    .unwrap();
    let validation = validation_mix(c, o, ct, 6102);

    let combined = combine(&[grid.clone(), balancing]).unwrap();
    let mut config = SweepConfig::new(workbench);
    config.offset_data = Some(grid);
    let report = run_sweep(std::slice::from_ref(&combined), &validation, &config).unwrap();

    let best = best_cell_norm(&report);
    let baseline = workbench_norm(&report);
    assert!(
        best <= 0.5 * baseline,
        "best {best} N vs workbench {baseline} N (need <= 0.5x)"
    );
    println!(
        "acceptance 09 (calibrated vs workbench residual): pass \
         (best {best:.3} N, workbench {baseline:.3} N, ratio {:.3})",
        best / baseline
    );
}

#[test]
fn acceptance_10_cli_determinism() {
    use std::fs;
    use std::process::Command;

    let bin = env!("CARGO_BIN_EXE_ftcal");
    let dir = tempfile::TempDir::new().unwrap();
    let root = dir.path();

    let run = |args: &[&str]| {
        let output = Command::new(bin)
            .current_dir(root)
            .args(args)
            .output()
            .expect("spawn ftcal");
        assert!(
            output.status.success(),
            "command {:?} failed: {}",
            args,
            String::from_utf8_lossy(&output.stderr)
        );
        output.stdout
    };

    let (c, _, _) = default_sensor();
    ftcal::io::write_workbench_csv(&root.join("cw.csv"), &c).unwrap();

    // generate twice
    let gen = |out: &str| {
        run(&[
            "generate", "--kind", "grid", "--n", "343", "--seed", "9", "--noise", "0.5", "--out",
            out,
        ])
    };
    let a1 = gen("g1.csv");
    let a2 = gen("g2.csv");
    let d1 = fs::read(root.join("g1.csv")).unwrap();
    let d2 = fs::read(root.join("g2.csv")).unwrap();
    assert_eq!(d1, d2, "generated datasets must be byte-identical");
    assert_eq!(
        fs::read(root.join("g1.csv.truth.json")).unwrap(),
        fs::read(root.join("g2.csv.truth.json")).unwrap()
    );
    let strip = |out: &[u8]| {
        String::from_utf8_lossy(out)
            .replace("g1.csv", "OUT")
            .replace("g2.csv", "OUT")
    };
    assert_eq!(strip(&a1), strip(&a2), "generate stdout must match");

    // calibrate twice
    let cal = |out: &str| {
        run(&[
            "calibrate",
            "--data",
            "g1.csv",
            "--type",
            "SwT",
            "--lambda",
            "10",
            "--workbench",
            "cw.csv",
            "--out",
            out,
        ])
    };
    let c1 = cal("c1.json");
    let c2 = cal("c2.json");
    assert_eq!(
        fs::read(root.join("c1.json")).unwrap(),
        fs::read(root.join("c2.json")).unwrap()
    );
    let strip_cal = |out: &[u8]| {
        String::from_utf8_lossy(out)
            .replace("c1.json", "OUT")
            .replace("c2.json", "OUT")
    };
    assert_eq!(strip_cal(&c1), strip_cal(&c2));

    // sweep twice (small grid for speed)
    run(&[
        "generate", "--kind", "random", "--n", "200", "--seed", "10", "--noise", "0.5", "--temp",
        "39:40.5", "--out", "val.csv",
    ]);
    let sweep = |out: &str| {
        run(&[
            "sweep",
            "--data",
            "g1.csv",
            "--validation",
            "val.csv",
            "--workbench",
            "cw.csv",
            "--types",
            "SnT,SwT",
            "--lambdas",
            "0,1000,1e6",
            "--out",
            out,
        ])
    };
    let s1 = sweep("s1.csv");
    let s2 = sweep("s2.csv");
    assert_eq!(
        fs::read(root.join("s1.csv")).unwrap(),
        fs::read(root.join("s2.csv")).unwrap()
    );
    let strip_sweep = |out: &[u8]| {
        String::from_utf8_lossy(out)
            .replace("s1.csv", "OUT")
            .replace("s2.csv", "OUT")
    };
    assert_eq!(strip_sweep(&s1), strip_sweep(&s2));

    // validate twice
    let v1 = run(&["validate", "--calibration", "c1.json", "--validation", "val.csv"]);
    let v2 = run(&["validate", "--calibration", "c1.json", "--validation", "val.csv"]);
    assert_eq!(v1, v2);

    // report twice
    let r1 = run(&["report", "--input", "s1.csv", "--format", "text"]);
    let r2 = run(&["report", "--input", "s1.csv", "--format", "text"]);
    assert_eq!(r1, r2);

    println!("acceptance 10 (CLI determinism): pass");
}
