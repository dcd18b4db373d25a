//! `ibr`: run inflated-beam robot benchmarks, sweeps and material fits.

mod manifest;

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use ibr_core::analysis::{
    export_trajectory, format_table, read_experimental_csv, AccuracyReport, BendingPlane, ExperimentalRecord,
};
use ibr_core::materials::data::{read_test_data, write_shear_curve};
use ibr_core::materials::fitting::{fit_neo_hookean_c10, fit_secant_modulus};
use ibr_core::materials::library::shear_curve_from_bias_test;
use ibr_core::scenarios::{
    build_beam_only, build_benchmark, format_pressure, ActuatorKind, ScenarioFile, ScenarioJob, ScenarioSpec,
};
use ibr_core::solver::{run, SolverError, Trajectory};
use log::warn;

use manifest::RunManifest;

#[derive(Parser)]
#[command(name = "ibr", version, about = "Membrane simulator for inflated-beam robots")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate one actuator at one pressure (beam only without --actuator).
    Simulate(SimulateArgs),
    /// Run a pressure or mesh-size sweep and aggregate d_max.
    Sweep(SweepArgs),
    /// Material characterisation tools.
    #[command(subcommand)]
    Material(MaterialCommand),
}

#[derive(Args, Clone)]
struct JobArgs {
    #[arg(long)]
    actuator: Option<ActuatorKind>,
    /// Beam mesh size (mm).
    #[arg(long)]
    mesh_beam: Option<f64>,
    /// Actuator mesh size (mm).
    #[arg(long)]
    mesh_actuator: Option<f64>,
    /// Scenario TOML (a run manifest works too).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output root; each run writes into a subdirectory.
    #[arg(long, env = "IBR_OUT_ROOT", default_value = "ibr-out")]
    out: PathBuf,
    /// Measured markers, `pressure_kPa,marker,dx_mm,dy_mm,var_mm`.
    #[arg(long)]
    exp: Option<PathBuf>,
    /// Fail (exit 1) when the run is not quasi-static at the end or the
    /// energy balance is off by more than 1%.
    #[arg(long)]
    strict: bool,
    /// Worker threads for element evaluation (0 = all cores).
    #[arg(long)]
    threads: Option<usize>,
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Peak actuator pressure (kPa).
    #[arg(long, allow_negative_numbers = true)]
    pressure: Option<f64>,
}

#[derive(Args)]
#[group(id = "sweep", required = true, multiple = false, args = ["pressures", "mesh"])]
struct SweepArgs {
    #[command(flatten)]
    job: JobArgs,
    /// Pressures (kPa), comma separated.
    #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
    pressures: Vec<f64>,
    /// Actuator mesh sizes (mm), comma separated; the beam mesh scales along.
    #[arg(long, value_delimiter = ',', num_args = 1..)]
    mesh: Vec<f64>,
    /// Pressure for a mesh sweep (kPa).
    #[arg(long, allow_negative_numbers = true)]
    pressure: Option<f64>,
}

#[derive(Args)]
struct StripArgs {
    /// Test data: `strain,stress_MPa` or `displacement_mm,force_N`.
    input: PathBuf,
    /// Sheet thickness (mm).
    #[arg(long, default_value_t = 0.2)]
    thickness: f64,
    #[arg(long, default_value_t = 250.0)]
    gauge_length: f64,
    #[arg(long, default_value_t = 20.0)]
    width: f64,
    #[arg(long, default_value_t = 250.0)]
    height: f64,
}

#[derive(Subcommand)]
enum MaterialCommand {
    /// Fit the Neo-Hookean C10 (MPa) to uniaxial data.
    FitNh(StripArgs),
    /// Convert a 45° bias-extension test into a shear curve.
    Shear {
        #[command(flatten)]
        strip: StripArgs,
        /// Output CSV, `gamma_rad,shear_stress_MPa`.
        #[arg(long, default_value = "shear_curve.csv")]
        out: PathBuf,
    },
    /// Secant modulus (MPa) over a strain window.
    Modulus {
        #[command(flatten)]
        strip: StripArgs,
        #[arg(long, default_value_t = 0.0)]
        from: f64,
        /// Upper strain; defaults to the last sample.
        #[arg(long)]
        to: Option<f64>,
    },
}

enum Failure {
    Usage(String),
    Numerical(String),
}

impl Failure {
    fn code(&self) -> ExitCode {
        match self {
            Failure::Numerical(_) => ExitCode::from(1),
            Failure::Usage(_) => ExitCode::from(2),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Sweep(a) => sweep(a),
        Command::Material(m) => material(m),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            match &f {
                Failure::Usage(m) => eprintln!("error: {m}"),
                Failure::Numerical(m) => eprintln!("failed: {m}"),
            }
            f.code()
        }
    }
}

/// Scenario from `--config` (or defaults) with command-line overrides.
fn resolve(args: &JobArgs, pressure: Option<f64>) -> Result<ScenarioFile, Failure> {
    let mut file = match &args.config {
        Some(p) => ScenarioFile::load(p).map_err(usage)?,
        None => ScenarioFile {
            actuator: args.actuator,
            spec: args.actuator.map_or_else(ScenarioSpec::default, ScenarioSpec::for_kind),
            solver: Default::default(),
        },
    };
    if args.actuator.is_some() {
        file.actuator = args.actuator;
    }
    if let Some(p) = pressure {
        if file.actuator.is_none() {
            return Err(usage("--pressure needs --actuator"));
        }
        file.spec.actuator_pressure = p;
    }
    if let Some(h) = args.mesh_beam {
        file.spec.mesh_size_beam = h;
    }
    if let Some(h) = args.mesh_actuator {
        file.spec.mesh_size_actuator = h;
    }
    if let Some(t) = args.threads {
        file.solver.threads = t;
    }
    Ok(file)
}

fn build(file: &ScenarioFile) -> Result<ScenarioJob, Failure> {
    match file.actuator {
        Some(k) => build_benchmark(k, file.spec.actuator_pressure, &file.spec, &file.solver),
        None => build_beam_only(&file.spec, &file.solver),
    }
    .map_err(usage)
}

fn load_experiment(path: Option<&Path>) -> Result<Vec<ExperimentalRecord>, Failure> {
    path.map_or(Ok(Vec::new()), |p| read_experimental_csv(p).map_err(usage))
}

struct Outcome {
    report: AccuracyReport,
    error: Option<String>,
}

/// Runs one job into `dir`, writing the VTK series, summary CSV, report
/// and manifest.
fn execute(file: &ScenarioFile, job: &ScenarioJob, dir: &Path, exp: &[ExperimentalRecord], strict: bool) -> Result<Outcome, Failure> {
    std::fs::create_dir_all(dir).map_err(|e| usage(format!("{}: {e}", dir.display())))?;
    let mut manifest = RunManifest::new(file.clone(), &job.stem());
    let start = Instant::now();
    let (trajectory, mut error): (Trajectory, Option<String>) = match run(job) {
        Ok(t) => (t, None),
        Err(SolverError::Divergence { time, step, message, partial }) => {
            (*partial, Some(format!("diverged at t = {time} s (step {step}): {message}")))
        }
        Err(e) => return Err(usage(e)),
    };
    manifest.run.wall_time_s = start.elapsed().as_secs_f64();

    let mesh = &job.assembly.mesh;
    let markers = job.markers();
    let plane = BendingPlane::from_assembly(&job.assembly);
    let stem = job.stem();
    let numerical = |e: ibr_core::analysis::AnalysisError| Failure::Numerical(e.to_string());
    let mut outputs = export_trajectory(mesh, &trajectory, markers, &plane, dir, &stem).map_err(numerical)?;
    let record = ExperimentalRecord::at_pressure(exp, job.pressure());
    if !exp.is_empty() && record.is_none() {
        warn!("no measured record at {} kPa", job.pressure());
    }
    let report = AccuracyReport::from_run(job.pressure(), &trajectory, markers, &mesh.rings, &plane, record).map_err(numerical)?;

    if error.is_none() && strict {
        if !report.quasi_static_ok {
            error = Some("not quasi-static at the end of the run".into());
        } else if report.energy_residual > 0.01 {
            error = Some(format!("energy residual {:.3}% above 1%", 100.0 * report.energy_residual));
        }
    }
    let name = job.kind.map_or("beam".to_string(), |k| k.name().to_string());
    let table = format_table(&[(name, vec![report.clone()])]);
    let report_path = dir.join(format!("{stem}_report.txt"));
    std::fs::write(&report_path, &table).map_err(|e| Failure::Numerical(format!("{}: {e}", report_path.display())))?;
    outputs.push(report_path);
    manifest.run.outputs = outputs;
    manifest.run.status = error.clone().unwrap_or_else(|| "ok".into());
    manifest.write(dir).map_err(|e| Failure::Numerical(format!("{}: {e}", dir.display())))?;

    let accuracy = report.accuracy.map_or("-".into(), |a| format!("{:.1}%", 100.0 * a));
    println!(
        "{stem}: d_max = {:.2} mm, d_tip = {:.2} mm, accuracy = {accuracy}, quasi-static = {}, energy residual = {:.2e}, wall {:.1} s",
        report.d_max, report.d_tip, report.quasi_static_ok, report.energy_residual, manifest.run.wall_time_s
    );
    Ok(Outcome { report, error })
}

fn simulate(a: SimulateArgs) -> Result<(), Failure> {
    let file = resolve(&a.job, a.pressure)?;
    let job = build(&file)?;
    let exp = load_experiment(a.job.exp.as_deref())?;
    let out = execute(&file, &job, &a.job.out.join(job.stem()), &exp, a.job.strict)?;
    match out.error {
        Some(e) => Err(Failure::Numerical(e)),
        None => Ok(()),
    }
}

fn sweep(a: SweepArgs) -> Result<(), Failure> {
    let base = resolve(&a.job, a.pressure)?;
    let Some(kind) = base.actuator else {
        return Err(usage("sweep needs --actuator"));
    };
    let (parameter, values) = if a.pressures.is_empty() {
        ("mesh_size_actuator_mm", a.mesh.clone())
    } else {
        ("pressure_kPa", a.pressures.clone())
    };
    let exp = load_experiment(a.job.exp.as_deref())?;
    let mut files = Vec::new();
    for &v in &values {
        let mut f = base.clone();
        if a.pressures.is_empty() {
            if !(v > 0.0) {
                return Err(usage(format!("mesh size must be positive, got {v}")));
            }
            f.spec.mesh_size_beam = base.spec.mesh_size_beam * v / base.spec.mesh_size_actuator;
            f.spec.mesh_size_actuator = v;
        } else {
            f.spec.actuator_pressure = v;
        }
        files.push(f);
    }
    // Validate every job before running any.
    let jobs = files.iter().map(build).collect::<Result<Vec<_>, _>>()?;

    std::fs::create_dir_all(&a.job.out).map_err(|e| usage(format!("{}: {e}", a.job.out.display())))?;
    let mut csv = format!("{parameter},d_max_mm,d_tip_mm,accuracy,quasistatic,energy_residual,status\n");
    let mut failed = 0;
    for ((file, job), v) in files.iter().zip(&jobs).zip(&values) {
        let dir = if a.pressures.is_empty() {
            a.job.out.join(format!("{}_h{}mm", job.stem(), format_pressure(*v)))
        } else {
            a.job.out.join(job.stem())
        };
        match execute(file, job, &dir, &exp, a.job.strict) {
            Ok(o) => {
                let r = &o.report;
                if o.error.is_some() {
                    failed += 1;
                }
                csv.push_str(&format!(
                    "{v},{},{},{},{},{},{}\n",
                    r.d_max,
                    r.d_tip,
                    r.accuracy.map_or(String::new(), |x| x.to_string()),
                    u8::from(r.quasi_static_ok),
                    r.energy_residual,
                    o.error.as_deref().unwrap_or("ok").replace(',', ";")
                ));
            }
            Err(Failure::Numerical(m)) | Err(Failure::Usage(m)) => {
                failed += 1;
                eprintln!("{}: {m}", job.stem());
                csv.push_str(&format!("{v},,,,,,{}\n", m.replace(',', ";")));
            }
        }
    }
    let path = a.job.out.join(format!("sweep_{kind}_{parameter}.csv"));
    std::fs::write(&path, csv).map_err(|e| Failure::Numerical(format!("{}: {e}", path.display())))?;
    println!("wrote {}", path.display());
    if failed > 0 {
        return Err(Failure::Numerical(format!("{failed} of {} jobs failed", values.len())));
    }
    Ok(())
}

fn strip_curve(s: &StripArgs, orientation: f64) -> Result<ibr_core::materials::fitting::UniaxialTestCurve, Failure> {
    read_test_data(&s.input)
        .and_then(|d| d.into_curve(orientation, s.gauge_length, s.width, s.height, s.thickness))
        .map_err(usage)
}

fn material(cmd: MaterialCommand) -> Result<(), Failure> {
    match cmd {
        MaterialCommand::FitNh(s) => {
            let c10 = fit_neo_hookean_c10(&strip_curve(&s, 0.0)?).map_err(usage)?;
            println!("C10 = {c10} MPa");
        }
        MaterialCommand::Shear { strip, out } => {
            let curve = shear_curve_from_bias_test(&strip_curve(&strip, 45.0)?).map_err(usage)?;
            write_shear_curve(&out, &curve).map_err(usage)?;
            println!("wrote {} points to {}", curve.len(), out.display());
        }
        MaterialCommand::Modulus { strip, from, to } => {
            let curve = strip_curve(&strip, 0.0)?;
            let hi = to.unwrap_or_else(|| curve.samples.last().map_or(0.0, |s| s.0));
            let e = fit_secant_modulus(&curve, (from, hi)).map_err(usage)?;
            println!("E = {e} MPa");
        }
    }
    Ok(())
}
