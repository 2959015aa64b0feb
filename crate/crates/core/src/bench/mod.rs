//! Experiment runner behind the `mbs-bench` binary.
//!
//! Numbers in CSV output use `{:.16e}`, which round-trips every `f64` and does
//! not depend on the locale.

mod config;
mod plot;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use crate::dae::DaeModel;
use crate::integrator::{integrate_with, relative_drift, ButcherTableau, IntegrationOptions, Trajectory};
use crate::lie::{log_so3, Formulation, Rotation};
use crate::models::{self, ModelKind, MultibodyModel};
use crate::oracle::{heavy_top_reference, AdaptiveSolverSettings};

pub use config::RunConfig;
pub use plot::{render_svg, PlotOptions};

/// Failure of a bench command, split by exit code.
#[derive(Debug)]
pub enum BenchError {
    /// Bad configuration, arguments or input files (exit code 2).
    Config(String),
    /// Simulation failure (exit code 3).
    Integration(crate::Error),
    /// Output could not be written (exit code 2).
    Io(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) | BenchError::Io(_) => 2,
            BenchError::Integration(_) => 3,
        }
    }

    pub fn message(&self) -> String {
        match self {
            BenchError::Config(m) | BenchError::Io(m) => m.clone(),
            BenchError::Integration(e) => e.to_string(),
        }
    }
}

impl fmt::Display for BenchError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BenchError::Config(m) => write!(f, "configuration error: {m}"),
            BenchError::Integration(e) => write!(f, "integration failed: {e}"),
            BenchError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for BenchError {}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<String>>) -> Result<(), BenchError> {
    let io = |e: &dyn fmt::Display| BenchError::Io(format!("{}: {e}", path.display()));
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io(&e))?;
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).map_err(|e| io(&e))?;
    for row in rows {
        w.write_record(&row).map_err(|e| io(&e))?;
    }
    let bytes = w.into_inner().map_err(|e| io(&e))?;
    fs::write(path, bytes).map_err(|e| io(&e))
}

pub const METRICS_HEADER: [&str; 11] = [
    "t",
    "g_max_abs",
    "g_j1",
    "g_j2",
    "g_j3",
    "T",
    "U",
    "E",
    "T_rel_drift",
    "E_rel_drift",
    "ortho_err",
];

pub const TRAJECTORY_HEADER: [&str; 20] = [
    "t", "body", "r00", "r01", "r02", "r10", "r11", "r12", "r20", "r21", "r22", "rx", "ry", "rz", "w1", "w2", "w3",
    "v1", "v2", "v3",
];

pub fn write_metrics_csv(path: &Path, traj: &Trajectory) -> Result<(), BenchError> {
    let d0 = &traj.diagnostics[0];
    let rows = traj.times.iter().zip(&traj.diagnostics).map(|(t, d)| {
        let mut row = vec![num(*t), num(d.max_abs_constraint())];
        for j in 0..3 {
            row.push(d.joints.get(j).map(|x| num(*x)).unwrap_or_default());
        }
        row.extend([
            num(d.kinetic),
            num(d.potential),
            num(d.energy()),
            num(relative_drift(d.kinetic, d0.kinetic)),
            num(relative_drift(d.energy(), d0.energy())),
            num(d.ortho_err),
        ]);
        row
    });
    write_csv(path, &METRICS_HEADER, rows)
}

pub fn write_trajectory_csv(path: &Path, traj: &Trajectory) -> Result<(), BenchError> {
    let mut rows = Vec::new();
    for (t, state) in traj.times.iter().zip(&traj.states) {
        for (i, (pose, tw)) in state.q.poses().iter().zip(&state.vel.twists).enumerate() {
            let mut row = vec![num(*t), i.to_string()];
            let r = pose.rot.matrix();
            for a in 0..3 {
                for b in 0..3 {
                    row.push(num(r[(a, b)]));
                }
            }
            row.extend(pose.pos.iter().chain(tw.w.iter()).chain(tw.v.iter()).map(|x| num(*x)));
            rows.push(row);
        }
    }
    write_csv(path, &TRAJECTORY_HEADER, rows)
}

fn build_model(kind: ModelKind, formulation: Formulation, config: &RunConfig) -> Result<MultibodyModel, BenchError> {
    match config.gravity {
        None => Ok(models::build(kind, formulation)),
        Some(g) => models::build_with_gravity(kind, formulation, g).map_err(BenchError::Integration),
    }
}

fn run(model: &MultibodyModel, config: &RunConfig) -> Result<(Trajectory, Duration), BenchError> {
    let start = Instant::now();
    let traj = integrate_with(
        model,
        &config.tableau,
        model.initial_state(),
        0.0,
        config.t_end,
        config.dt,
        IntegrationOptions {
            output_stride: config.output_stride,
        },
    )
    .map_err(BenchError::Integration)?;
    Ok((traj, start.elapsed()))
}

/// Scalar results of one run.
#[derive(Clone, Debug, PartialEq)]
pub struct RunSummary {
    pub model: ModelKind,
    pub formulation: Formulation,
    pub samples: usize,
    pub max_abs_constraint: f64,
    pub max_joint_violations: Vec<f64>,
    pub final_kinetic_drift: f64,
    pub final_energy_drift: f64,
    pub wall_time: Duration,
}

impl RunSummary {
    fn of(model: &MultibodyModel, traj: &Trajectory, wall_time: Duration) -> Self {
        let d0 = &traj.diagnostics[0];
        let d1 = traj.diagnostics.last().unwrap();
        RunSummary {
            model: model.kind().expect("bench models are presets"),
            formulation: model.formulation(),
            samples: traj.len(),
            max_abs_constraint: traj
                .diagnostics
                .iter()
                .map(|d| d.max_abs_constraint())
                .fold(0.0, f64::max),
            max_joint_violations: traj.max_joint_violations(),
            final_kinetic_drift: relative_drift(d1.kinetic, d0.kinetic),
            final_energy_drift: relative_drift(d1.energy(), d0.energy()),
            wall_time,
        }
    }
}

impl fmt::Display for RunSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{} / {}: {} samples", self.model, self.formulation, self.samples)?;
        writeln!(f, "  max |g|            {:.3e}", self.max_abs_constraint)?;
        for (j, v) in self.max_joint_violations.iter().enumerate() {
            writeln!(f, "  max ‖g_j{}‖         {v:.3e}", j + 1)?;
        }
        writeln!(f, "  final T drift      {:.3e}", self.final_kinetic_drift)?;
        writeln!(f, "  final E drift      {:.3e}", self.final_energy_drift)?;
        write!(f, "  wall time          {:.3} s", self.wall_time.as_secs_f64())
    }
}

pub fn metrics_path(config: &RunConfig, formulation: Formulation) -> PathBuf {
    config.output.join(format!("{}_{}_metrics.csv", config.model, formulation))
}

pub fn trajectory_path(config: &RunConfig, formulation: Formulation) -> PathBuf {
    config.output.join(format!("{}_{}_trajectory.csv", config.model, formulation))
}

/// Runs one simulation and writes its metrics and trajectory CSV files.
pub fn cmd_simulate(config: &RunConfig) -> Result<RunSummary, BenchError> {
    config.validate()?;
    let model = build_model(config.model, config.formulation, config)?;
    let (traj, wall) = run(&model, config)?;
    write_metrics_csv(&metrics_path(config, config.formulation), &traj)?;
    write_trajectory_csv(&trajectory_path(config, config.formulation), &traj)?;
    Ok(RunSummary::of(&model, &traj, wall))
}

#[derive(Clone, Debug, PartialEq)]
pub struct CompareSummary {
    pub se3: RunSummary,
    pub so3xr3: RunSummary,
}

fn ratio(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        f64::INFINITY
    } else {
        a / b
    }
}

impl CompareSummary {
    /// max |g| under SO(3)×ℝ³ over max |g| under SE(3).
    pub fn violation_ratio(&self) -> f64 {
        ratio(self.so3xr3.max_abs_constraint, self.se3.max_abs_constraint)
    }

    pub fn kinetic_drift_ratio(&self) -> f64 {
        ratio(self.so3xr3.final_kinetic_drift, self.se3.final_kinetic_drift)
    }
}

impl fmt::Display for CompareSummary {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.se3)?;
        writeln!(f, "{}", self.so3xr3)?;
        writeln!(f, "ratio so3xr3/se3 max |g|      {:.3e}", self.violation_ratio())?;
        write!(f, "ratio so3xr3/se3 final T drift {:.3e}", self.kinetic_drift_ratio())
    }
}

/// Runs both formulations from the same physical initial state and writes a
/// combined CSV `<model>_compare.csv`.
pub fn cmd_compare(config: &RunConfig) -> Result<CompareSummary, BenchError> {
    config.validate()?;
    let models = [
        build_model(config.model, Formulation::Se3, config)?,
        build_model(config.model, Formulation::DirectProduct, config)?,
    ];
    let results: Vec<Result<(Trajectory, Duration), BenchError>> = std::thread::scope(|s| {
        let handles: Vec<_> = models.iter().map(|m| s.spawn(move || run(m, config))).collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("simulation thread panicked"))
            .collect()
    });
    let mut runs = Vec::new();
    for r in results {
        runs.push(r?);
    }
    let (ta, tb) = (&runs[0].0, &runs[1].0);
    let header = [
        "t",
        "g_max_abs_se3",
        "g_max_abs_so3xr3",
        "T_rel_drift_se3",
        "T_rel_drift_so3xr3",
        "E_rel_drift_se3",
        "E_rel_drift_so3xr3",
    ];
    let (a0, b0) = (&ta.diagnostics[0], &tb.diagnostics[0]);
    let rows = ta.times.iter().zip(ta.diagnostics.iter().zip(&tb.diagnostics)).map(|(t, (a, b))| {
        vec![
            num(*t),
            num(a.max_abs_constraint()),
            num(b.max_abs_constraint()),
            num(relative_drift(a.kinetic, a0.kinetic)),
            num(relative_drift(b.kinetic, b0.kinetic)),
            num(relative_drift(a.energy(), a0.energy())),
            num(relative_drift(b.energy(), b0.energy())),
        ]
    });
    write_csv(&config.output.join(format!("{}_compare.csv", config.model)), &header, rows)?;
    Ok(CompareSummary {
        se3: RunSummary::of(&models[0], ta, runs[0].1),
        so3xr3: RunSummary::of(&models[1], tb, runs[1].1),
    })
}

/// Default step sizes of the order study.
pub const CONVERGENCE_DTS: [f64; 4] = [4e-3, 2e-3, 1e-3, 5e-4];

/// Time at which orientation errors are measured.
pub const CONVERGENCE_TIME: f64 = 1.0;

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceResult {
    pub tableau: String,
    pub formulation: Formulation,
    /// `(dt, ‖log(R_refᵀ R)‖)`
    pub points: Vec<(f64, f64)>,
    pub slope: f64,
}

impl fmt::Display for ConvergenceResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "heavy_top / {} / {}: orientation error at t = {CONVERGENCE_TIME} s", self.formulation, self.tableau)?;
        for (dt, e) in &self.points {
            writeln!(f, "  dt = {dt:.3e}  error = {e:.6e}")?;
        }
        write!(f, "slope {:.4}", self.slope)
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0.ln()).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1.ln()).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0.ln() - mx) * (p.1.ln() - my)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0.ln() - mx).powi(2)).sum();
    sxy / sxx
}

/// Settings of the reference solution used by [`convergence_study`]; much
/// tighter than the smallest error it is compared with.
pub fn convergence_reference_settings() -> AdaptiveSolverSettings {
    AdaptiveSolverSettings::with_tolerances(1e-13, 1e-14)
}

/// Global orientation error of the heavy top at `t = 1 s` for each `dt`.
///
/// Runs that abort, or whose error is outside the domain of `log`, report an
/// error of `π`.
pub fn convergence_study(
    tableau: &ButcherTableau,
    formulation: Formulation,
    dts: &[f64],
) -> Result<ConvergenceResult, BenchError> {
    if dts.len() < 2 {
        return Err(BenchError::Config("the order study needs at least two step sizes".into()));
    }
    if let Some(dt) = dts.iter().find(|d| !(**d > 0.0 && d.is_finite())) {
        return Err(BenchError::Config(format!("step size {dt} is not positive")));
    }
    let reference = heavy_top_reference(CONVERGENCE_TIME, &convergence_reference_settings())
        .map_err(BenchError::Integration)?;
    let (q, _) = reference.sample(CONVERGENCE_TIME).map_err(BenchError::Integration)?;
    let r_ref = Rotation::from_matrix_unchecked(q.to_matrix());
    let model = models::heavy_top(formulation);
    let mut points = Vec::with_capacity(dts.len());
    for &dt in dts {
        let traj = integrate_with(
            &model,
            tableau,
            model.initial_state(),
            0.0,
            CONVERGENCE_TIME,
            dt,
            IntegrationOptions {
                output_stride: usize::MAX,
            },
        );
        let err = match traj {
            Ok(traj) => log_so3(&(r_ref.transpose() * traj.last_state().q.poses()[0].rot))
                .map(|w| w.norm())
                .unwrap_or(std::f64::consts::PI),
            Err(_) => std::f64::consts::PI,
        };
        points.push((dt, err));
    }
    Ok(ConvergenceResult {
        tableau: tableau.name.clone(),
        formulation,
        slope: log_log_slope(&points),
        points,
    })
}

/// Order study on the heavy top; writes `convergence_<tableau>.csv`.
pub fn cmd_convergence(config: &RunConfig, dts: &[f64]) -> Result<ConvergenceResult, BenchError> {
    if config.model != ModelKind::HeavyTop {
        return Err(BenchError::Config(format!(
            "convergence needs a reference solution, which exists only for heavy_top (got {})",
            config.model
        )));
    }
    let result = convergence_study(&config.tableau, config.formulation, dts)?;
    let rows = result.points.iter().map(|(dt, e)| vec![num(*dt), num(*e)]);
    write_csv(
        &config.output.join(format!("convergence_{}.csv", config.tableau.name)),
        &["dt", "orientation_error"],
        rows,
    )?;
    Ok(result)
}

/// Reads `input`, plots `columns` against `options.x_column` and writes the SVG.
pub fn cmd_plot(input: &Path, columns: &[String], output: &Path, options: &PlotOptions) -> Result<(), BenchError> {
    let mut reader = csv::Reader::from_path(input)
        .map_err(|e| BenchError::Config(format!("cannot read {}: {e}", input.display())))?;
    let headers: Vec<String> = reader
        .headers()
        .map_err(|e| BenchError::Config(format!("{}: {e}", input.display())))?
        .iter()
        .map(str::to_owned)
        .collect();
    let index = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| BenchError::Config(format!("column `{name}` not found in {}", input.display())))
    };
    if columns.is_empty() {
        return Err(BenchError::Config("no columns to plot".into()));
    }
    let xi = index(&options.x_column)?;
    let yi = columns.iter().map(|c| index(c)).collect::<Result<Vec<_>, _>>()?;
    let mut x = Vec::new();
    let mut ys = vec![Vec::new(); columns.len()];
    for record in reader.records() {
        let record = record.map_err(|e| BenchError::Config(format!("{}: {e}", input.display())))?;
        let parse = |i: usize| record.get(i).and_then(|s| s.trim().parse::<f64>().ok());
        x.push(parse(xi).unwrap_or(f64::NAN));
        for (series, &i) in ys.iter_mut().zip(&yi) {
            series.push(parse(i).unwrap_or(f64::NAN));
        }
    }
    let named: Vec<(&str, &[f64])> = columns.iter().map(String::as_str).zip(ys.iter().map(Vec::as_slice)).collect();
    let svg = render_svg(&x, &named, options);
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| BenchError::Io(format!("{}: {e}", dir.display())))?;
    }
    fs::write(output, svg).map_err(|e| BenchError::Io(format!("{}: {e}", output.display())))
}
