//! Command-line front end: calibrate, sweep, validate, generate and report.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use nalgebra::Matrix6;

use ftcal::error::Error;
use ftcal::io;
use ftcal::model::{Dataset, EstimationConfig, EstimationType};
use ftcal::pipeline::{calibrate, OffsetSource};
use ftcal::solver::SolveMethod;
use ftcal::synth::{self, MotionKind, RampShape, ScenarioSpec};
use ftcal::validate::{
    best_by_axis, best_overall, mse_per_axis, mse_reduction_percent, report_to_text, run_sweep,
    SweepConfig, SweepEntry, AXIS_NAMES, LAMBDA_SCHEDULE,
};

#[derive(Parser)]
#[command(
    name = "ftcal",
    about = "In-situ calibration of six-axis force/torque sensors with temperature compensation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Estimate a calibration from one or more datasets.
    Calibrate(CalibrateArgs),
    /// Run the estimation-type x lambda grid and write a report CSV.
    Sweep(SweepArgs),
    /// Evaluate a calibration file against a validation dataset.
    Validate(ValidateArgs),
    /// Generate a synthetic dataset with a known ground truth.
    Generate(GenerateArgs),
    /// Re-render a sweep report CSV.
    Report(ReportArgs),
}

#[derive(Args)]
struct CalibrateArgs {
    /// Calibration dataset(s); several files are combined in order.
    #[arg(long, required = true, num_args = 1..)]
    data: Vec<PathBuf>,
    /// Dataset the sphere offset is fitted on (default: first --data file).
    #[arg(long)]
    offset_data: Option<PathBuf>,
    /// Estimation type: SnT, SwT, CnT or CwT.
    #[arg(long = "type")]
    estimation_type: String,
    /// Regularization strength toward the workbench matrix.
    #[arg(long, default_value = "0")]
    lambda: f64,
    /// Workbench matrix CSV. Required when lambda > 0 and for sphere types.
    #[arg(long)]
    workbench: Option<PathBuf>,
    /// Also apply the penalty to the extra-variable coefficients.
    #[arg(long)]
    regularize_extras: bool,
    /// Output calibration JSON.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct SweepArgs {
    /// Calibration dataset(s). Each file is swept as its own pairing unless
    /// --combine is given.
    #[arg(long, required = true, num_args = 1..)]
    data: Vec<PathBuf>,
    /// Merge all --data files into one combined calibration dataset.
    #[arg(long)]
    combine: bool,
    /// Validation dataset; must be distinct from every calibration path.
    #[arg(long)]
    validation: PathBuf,
    /// Workbench matrix CSV (regularization target and baseline row).
    #[arg(long)]
    workbench: PathBuf,
    /// Dataset the sphere offset is fitted on (default: first --data file).
    #[arg(long)]
    offset_data: Option<PathBuf>,
    /// Comma-separated estimation types.
    #[arg(long, default_value = "SnT,SwT,CnT,CwT")]
    types: String,
    /// Comma-separated lambda values (default: the 13-value schedule).
    #[arg(long)]
    lambdas: Option<String>,
    /// Output report CSV.
    #[arg(long)]
    out: PathBuf,
    /// Additionally print the aligned text table.
    #[arg(long, default_value = "csv")]
    format: String,
}

#[derive(Args)]
struct ValidateArgs {
    /// Calibration JSON to evaluate.
    #[arg(long)]
    calibration: PathBuf,
    /// Validation dataset CSV.
    #[arg(long)]
    validation: PathBuf,
    /// Optional no-temperature calibration to report MSE reductions against.
    #[arg(long)]
    baseline: Option<PathBuf>,
}

#[derive(Args)]
struct GenerateArgs {
    /// Motion archetype: grid, balancing or random.
    #[arg(long)]
    kind: String,
    #[arg(long, default_value = "1000")]
    n: usize,
    #[arg(long, default_value = "0")]
    seed: u64,
    /// Temperature profile start:end in degrees Celsius.
    #[arg(long, default_value = "32:41.2")]
    temp: String,
    /// Ramp shape: linear or saturating.
    #[arg(long, default_value = "linear")]
    shape: String,
    /// Time constant (s) of the saturating ramp.
    #[arg(long, default_value = "30")]
    time_constant: f64,
    /// Suspended mass in kg.
    #[arg(long, default_value = "33")]
    mass: f64,
    /// Raw-space noise standard deviation (counts), all channels.
    #[arg(long, default_value = "0")]
    noise: f64,
    /// First-order lag (s) on the temperature the drift term sees.
    #[arg(long, default_value = "0")]
    hysteresis: f64,
    /// Calibration JSON supplying the ground-truth C, o and Ct
    /// (default: a built-in plausible sensor).
    #[arg(long)]
    truth_model: Option<PathBuf>,
    /// Output dataset CSV.
    #[arg(long)]
    out: PathBuf,
    /// Ground-truth sidecar path (default: <out>.truth.json).
    #[arg(long)]
    truth_out: Option<PathBuf>,
}

#[derive(Args)]
struct ReportArgs {
    /// Sweep report CSV produced by the sweep subcommand.
    #[arg(long)]
    input: PathBuf,
    /// Output format: text or csv.
    #[arg(long, default_value = "text")]
    format: String,
}

/// A failure with the exit code it maps to: 2 for precondition violations,
/// 1 for parse/data/solve failures.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn precondition(message: impl Into<String>) -> Self {
        Self {
            code: 2,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Self {
            code: 1,
            message: e.to_string(),
        }
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    // Die quietly when stdout is closed early (e.g. piped into `head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }

    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Calibrate(args) => cmd_calibrate(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Validate(args) => cmd_validate(args),
        Command::Generate(args) => cmd_generate(args),
        Command::Report(args) => cmd_report(args),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}

/// Parses the estimation type before touching any file.
fn parse_type(s: &str) -> Result<EstimationType, Failure> {
    s.parse::<EstimationType>()
        .map_err(|e| Failure::precondition(e.to_string()))
}

fn parse_lambda_list(s: &str) -> Result<Vec<f64>, Failure> {
    let mut out = Vec::new();
    for part in s.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        let v: f64 = part
            .parse()
            .map_err(|_| Failure::precondition(format!("invalid lambda '{part}'")))?;
        if !v.is_finite() || v < 0.0 {
            return Err(Failure::precondition(format!(
                "lambda must be finite and non-negative, got {part}"
            )));
        }
        out.push(v);
    }
    if out.is_empty() {
        return Err(Failure::precondition("empty lambda list"));
    }
    Ok(out)
}

fn load_datasets(paths: &[PathBuf]) -> Result<Vec<Dataset>, Failure> {
    paths
        .iter()
        .map(|p| io::read_dataset_csv(p).map_err(Failure::from))
        .collect()
}

/// The workbench matrix is needed whenever the penalty is active or a
/// sphere-type offset must map raw counts into force space.
fn require_workbench(
    path: &Option<PathBuf>,
    lambda: f64,
    ty: EstimationType,
) -> Result<Option<Matrix6<f64>>, Failure> {
    match path {
        Some(p) => Ok(Some(io::read_workbench_csv(p)?)),
        None if lambda > 0.0 => Err(Failure::precondition(
            "lambda > 0 requires --workbench (the regularization target)",
        )),
        None if ty.uses_sphere_offset() => Err(Failure::precondition(
            "sphere estimation types require --workbench to map raw counts into force space",
        )),
        None => Ok(None),
    }
}

fn method_name(method: SolveMethod) -> &'static str {
    match method {
        SolveMethod::NormalEquations => "normal_equations",
        SolveMethod::StackedQr => "stacked_qr",
        SolveMethod::StackedSvd => "stacked_svd",
    }
}

fn cmd_calibrate(args: CalibrateArgs) -> CmdResult {
    let ty = parse_type(&args.estimation_type)?;
    if !(args.lambda.is_finite() && args.lambda >= 0.0) {
        return Err(Failure::precondition(format!(
            "lambda must be finite and non-negative, got {}",
            args.lambda
        )));
    }
    let workbench = require_workbench(&args.workbench, args.lambda, ty)?;

    let datasets = load_datasets(&args.data)?;
    let offset_data = args
        .offset_data
        .as_ref()
        .map(|p| io::read_dataset_csv(p))
        .transpose()?;

    let mut config =
        EstimationConfig::new(ty, args.lambda, workbench.unwrap_or_else(Matrix6::zeros))?;
    config.regularize_extras = args.regularize_extras;

    let offset_source = match &offset_data {
        Some(ds) => OffsetSource::Dataset(ds),
        None => OffsetSource::FirstDataset,
    };
    let outcome = calibrate(&datasets, offset_source, &config)?;

    let combined_for_mse;
    let training: &Dataset = if datasets.len() == 1 {
        &datasets[0]
    } else {
        combined_for_mse = synth::combine(&datasets)?;
        &combined_for_mse
    };
    let metrics = mse_per_axis(&outcome.model, training)?;

    println!(
        "dataset: {} (n={}, kind={})",
        training.name,
        training.len(),
        training.kind
    );
    println!("estimation type: {ty}, lambda: {}", io::format_float(args.lambda));
    if let Some(est) = &outcome.offset_estimate {
        println!(
            "offset: method={} source={} fit_rms={:.6e}",
            est.method, est.source_dataset, est.fit_rms
        );
    }
    println!(
        "condition estimate: {:.6e} (method: {})",
        outcome.diagnostics.condition_estimate,
        method_name(outcome.diagnostics.method)
    );
    println!("training MSE per axis:");
    for (axis, name) in AXIS_NAMES.iter().enumerate() {
        println!("  {name}: {:.6e}", metrics.mse[axis]);
    }
    if let Some(w) = workbench {
        let distance = (outcome.model.calibration() - w).norm();
        println!("||C - C_w||: {distance:.6e}");
    }

    io::write_calibration_json(&args.out, &outcome.model)?;
    println!("wrote calibration to {}", args.out.display());
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> CmdResult {
    let mut types = Vec::new();
    for part in args.types.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        types.push(parse_type(part)?);
    }
    if types.is_empty() {
        return Err(Failure::precondition("empty estimation-type list"));
    }
    let lambdas = match &args.lambdas {
        Some(s) => parse_lambda_list(s)?,
        None => LAMBDA_SCHEDULE.to_vec(),
    };
    if !matches!(args.format.as_str(), "csv" | "text") {
        return Err(Failure::precondition(format!(
            "unknown format '{}' (expected csv or text)",
            args.format
        )));
    }
    for p in &args.data {
        if p == &args.validation {
            return Err(Failure::precondition(format!(
                "calibration and validation paths must be distinct: {}",
                p.display()
            )));
        }
    }

    let workbench = io::read_workbench_csv(&args.workbench)?;
    let datasets = load_datasets(&args.data)?;
    let calibration_sets = if args.combine && datasets.len() > 1 {
        vec![synth::combine(&datasets)?]
    } else {
        datasets.clone()
    };
    let validation = io::read_dataset_csv(&args.validation)?;

    let mut config = SweepConfig::new(workbench);
    config.types = types;
    config.lambdas = lambdas;
    config.offset_data = match &args.offset_data {
        Some(p) => Some(io::read_dataset_csv(p)?),
        None => Some(datasets[0].clone()),
    };

    let report = run_sweep(&calibration_sets, &validation, &config)?;
    io::write_sweep_csv(&args.out, &report)?;
    println!("wrote sweep report to {}", args.out.display());

    if args.format == "text" {
        print!("{}", report_to_text(&report));
    }

    match best_overall(&report) {
        Some(row) => {
            let SweepEntry::Estimation {
                estimation_type,
                lambda,
            } = row.entry
            else {
                unreachable!("best_overall returns estimation rows");
            };
            let norm = row.metrics.as_ref().expect("ok row").residual_norm_mean;
            println!(
                "best: dataset={} type={estimation_type} lambda={} force_norm_mean={norm:.4}",
                row.dataset,
                io::format_float(lambda)
            );
            if let Some(best) = best_by_axis(&report) {
                println!("best by axis:");
                for b in &best {
                    println!(
                        "  {}: dataset={} type={} lambda={} value={:.5}",
                        AXIS_NAMES[b.axis],
                        b.dataset,
                        b.estimation_type,
                        io::format_float(b.lambda),
                        b.value
                    );
                }
            }
            Ok(())
        }
        None => Err(Failure {
            code: 1,
            message: "every sweep cell failed".into(),
        }),
    }
}

fn cmd_validate(args: ValidateArgs) -> CmdResult {
    let model = io::read_calibration_json(&args.calibration)?;
    let dataset = io::read_dataset_csv(&args.validation)?;
    let metrics = mse_per_axis(&model, &dataset)?;

    println!(
        "calibration: {} (m={}, type={})",
        args.calibration.display(),
        model.m(),
        model
            .metadata
            .estimation_type
            .map(|t| t.to_string())
            .unwrap_or_else(|| "n/a".into())
    );
    println!("validation dataset: {} (n={})", dataset.name, dataset.len());
    println!("axis        mse        rms   mean_abs");
    for (axis, name) in AXIS_NAMES.iter().enumerate() {
        println!(
            "{name:<4} {:>10.4e} {:>10.4e} {:>10.4e}",
            metrics.mse[axis],
            metrics.mse[axis].sqrt(),
            metrics.mean_abs_residual[axis]
        );
    }
    println!("force residual norm mean: {:.4} N", metrics.residual_norm_mean);

    if let Some(baseline_path) = &args.baseline {
        let baseline_model = io::read_calibration_json(baseline_path)?;
        let baseline = mse_per_axis(&baseline_model, &dataset)?;
        println!("MSE reduction vs baseline (%):");
        for (axis, name) in AXIS_NAMES.iter().enumerate() {
            match mse_reduction_percent(baseline.mse[axis], metrics.mse[axis]) {
                Ok(pct) => println!("  {name}: {pct:.2}"),
                Err(_) => println!("  {name}: n/a (zero-baseline)"),
            }
        }
    }
    Ok(())
}

fn cmd_generate(args: GenerateArgs) -> CmdResult {
    let kind: MotionKind = args
        .kind
        .parse()
        .map_err(|e: Error| Failure::precondition(e.to_string()))?;
    let (start, end) = args
        .temp
        .split_once(':')
        .ok_or_else(|| Failure::precondition("expected --temp start:end"))?;
    let start: f64 = start
        .trim()
        .parse()
        .map_err(|_| Failure::precondition(format!("invalid temperature '{start}'")))?;
    let end: f64 = end
        .trim()
        .parse()
        .map_err(|_| Failure::precondition(format!("invalid temperature '{end}'")))?;
    let ramp = match args.shape.as_str() {
        "linear" => RampShape::Linear,
        "saturating" => RampShape::Saturating {
            time_constant: args.time_constant,
        },
        other => {
            return Err(Failure::precondition(format!(
                "unknown ramp shape '{other}' (expected linear or saturating)"
            )))
        }
    };

    let mut spec = ScenarioSpec::new(kind, args.n, args.seed)
        .with_temperature(start, end)
        .with_ramp(ramp)
        .with_mass(args.mass)
        .with_noise(args.noise)
        .with_hysteresis_lag(args.hysteresis);
    if let Some(path) = &args.truth_model {
        let truth = io::read_calibration_json(path)?;
        let ct = match truth.m() {
            0 => nalgebra::Vector6::zeros(),
            _ => nalgebra::Vector6::from_fn(|i, _| truth.extra_coefficients()[(i, 0)]),
        };
        spec = spec.with_truth(*truth.calibration(), *truth.offset(), ct);
    }

    let (dataset, truth) = synth::generate(&spec)?;
    io::write_dataset_csv(&args.out, &dataset)?;
    let truth_path = args.truth_out.clone().unwrap_or_else(|| {
        let mut s = args.out.as_os_str().to_owned();
        s.push(".truth.json");
        PathBuf::from(s)
    });
    io::write_calibration_json(&truth_path, &truth)?;

    println!(
        "wrote dataset to {} (kind={}, n={}, temp {}:{})",
        args.out.display(),
        dataset.kind,
        dataset.len(),
        io::format_float(start),
        io::format_float(end)
    );
    println!("wrote ground truth to {}", truth_path.display());
    Ok(())
}

fn cmd_report(args: ReportArgs) -> CmdResult {
    let report = io::read_sweep_csv(&args.input)?;
    match args.format.as_str() {
        "text" => {
            print!("{}", report_to_text(&report));
            if let Some(row) = best_overall(&report) {
                let SweepEntry::Estimation {
                    estimation_type,
                    lambda,
                } = row.entry
                else {
                    unreachable!("best_overall returns estimation rows");
                };
                println!(
                    "best: dataset={} type={estimation_type} lambda={} force_norm_mean={:.4}",
                    row.dataset,
                    io::format_float(lambda),
                    row.metrics.as_ref().expect("ok row").residual_norm_mean
                );
            }
            Ok(())
        }
        "csv" => {
            print!("{}", ftcal::validate::report_to_csv(&report));
            Ok(())
        }
        other => Err(Failure::precondition(format!(
            "unknown format '{other}' (expected text or csv)"
        ))),
    }
}
