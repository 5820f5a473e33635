//! Command-line front end. Exit codes: 0 success, 1 invalid input (the
//! violated invariant is named), 2 solver failure (the failing cell is named).

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::json;

use crate::dynamic::{self, DynamicError, RunOptions};
use crate::exact::{EvolutionaryExact, StationaryExact};
use crate::geometry::{GeometryError, SurfaceSpec, YieldSurface};
use crate::lab::{self, LabError, SweepKind, SweepPlan};
use crate::output;
use crate::quasistatic::{qs_evolve, saturation_distance, solve_stationary, QsReduction};
use crate::scenario::{ExactReference, Overrides, Scenario, ScenarioConfig, ScenarioError, DEFAULT_SEED};

#[derive(Debug, Parser)]
#[command(name = "plastiflow", version, about = "Norton-Hoff approximation of dynamic perfect plasticity")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Explicit dynamic run: trajectory CSV, energy ledger and diagnostics.
    Dynamic(RunArgs),
    /// Spatially homogeneous quasi-static evolution.
    Quasistatic(RunArgs),
    /// Stationary two-point problem.
    Stationary(RunArgs),
    /// Closed-form reference fields in the solver CSV schema.
    Exact(ExactArgs),
    /// Concurrent sweep over a decreasing alpha ladder.
    Sweep(SweepArgs),
    /// Sampled curvature and radii report for a yield surface.
    VerifyGeometry(GeometryArgs),
}

#[derive(Debug, Args)]
pub struct ScenarioArgs {
    #[arg(long)]
    pub scenario: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct OverrideArgs {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Number of grid nodes.
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
}

impl OverrideArgs {
    fn overrides(&self) -> Overrides {
        Overrides { alpha: self.alpha, lambda: self.lambda, nodes: self.nx, dt: self.dt, t_end: self.t_end }
    }
}

#[derive(Debug, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub io: ScenarioArgs,
    #[command(flatten)]
    pub overrides: OverrideArgs,
}

#[derive(Debug, Args)]
pub struct ExactArgs {
    #[command(flatten)]
    pub io: ScenarioArgs,
    /// Number of output points.
    #[arg(long, default_value_t = 200)]
    pub grid: usize,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SolverArg {
    Dynamic,
    Stationary,
    Quasistatic,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    #[command(flatten)]
    pub io: ScenarioArgs,
    /// Strictly decreasing alpha ladder.
    #[arg(long, value_delimiter = ',', default_values_t = [0.4, 0.2, 0.1, 0.05])]
    pub alphas: Vec<f64>,
    #[arg(long, default_value_t = 1e3)]
    pub lambda: f64,
    /// Solver per cell; inferred from the scenario when omitted.
    #[arg(long, value_enum)]
    pub solver: Option<SolverArg>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long = "t-end")]
    pub t_end: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum SurfaceArg {
    Interval,
    VonMises,
    Hosford,
}

#[derive(Debug, Args)]
pub struct GeometryArgs {
    #[arg(long, value_enum)]
    pub surface: SurfaceArg,
    /// Hosford exponent.
    #[arg(long, default_value_t = 2.0)]
    pub p: f64,
    #[arg(long, default_value_t = 3)]
    pub dim: usize,
    /// Von Mises radius.
    #[arg(long, default_value_t = 1.0)]
    pub radius: f64,
    #[arg(long, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Directory for the JSON report; printed to stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug)]
pub enum CliError {
    Validation { invariant: String, detail: String },
    Solver { cell: String, detail: String },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Validation { .. } => 1,
            CliError::Solver { .. } => 2,
        }
    }

    fn validation(invariant: &str, detail: impl ToString) -> Self {
        CliError::Validation { invariant: invariant.into(), detail: detail.to_string() }
    }

    fn solver(cell: &str, detail: impl ToString) -> Self {
        CliError::Solver { cell: cell.into(), detail: detail.to_string() }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Validation { invariant, detail } => write!(f, "validation error [{invariant}]: {detail}"),
            CliError::Solver { cell, detail } => write!(f, "solver failure in {cell}: {detail}"),
        }
    }
}

impl From<ScenarioError> for CliError {
    fn from(e: ScenarioError) -> Self {
        match e {
            ScenarioError::Validation { invariant, detail } => CliError::validation(invariant, detail),
            ScenarioError::Parse(detail) => CliError::validation("config syntax", detail),
            other => CliError::validation("scenario parameters", other),
        }
    }
}

impl From<GeometryError> for CliError {
    fn from(e: GeometryError) -> Self {
        CliError::validation("yield surface", e)
    }
}

/// Id used for single runs, matching the first cell of a sweep.
const SINGLE_CELL: &str = "cell-00";

/// Parses `args` and runs the command; returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli.command) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(e) => {
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

/// Runs a parsed command and returns a one-line summary.
pub fn execute(command: &Command) -> Result<String, CliError> {
    match command {
        Command::Dynamic(a) => run_dynamic(a),
        Command::Quasistatic(a) => run_quasistatic(a),
        Command::Stationary(a) => run_stationary(a),
        Command::Exact(a) => run_exact(a),
        Command::Sweep(a) => run_sweep(a),
        Command::VerifyGeometry(a) => verify_geometry(a),
    }
}

fn load_config(path: &Path) -> Result<ScenarioConfig, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|e| CliError::validation("scenario file exists", format!("{}: {e}", path.display())))?;
    Ok(ScenarioConfig::from_toml(&text)?)
}

fn load(args: &RunArgs) -> Result<Scenario, CliError> {
    let mut config = load_config(&args.io.scenario)?;
    config.apply(&args.overrides.overrides());
    Ok(Scenario::new(config)?)
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    fs::create_dir_all(dir).map_err(|e| CliError::validation("output directory writable", format!("{}: {e}", dir.display())))
}

fn write_file(path: &Path, contents: &[u8]) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| CliError::validation("output directory writable", format!("{}: {e}", path.display())))
}

fn write_csv<R: Serialize>(path: &Path, rows: Vec<R>) -> Result<(), CliError> {
    let mut buf = Vec::new();
    output::write_rows(&mut buf, rows).map_err(|e| CliError::validation("output directory writable", e))?;
    write_file(path, &buf)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), CliError> {
    let mut text = serde_json::to_string_pretty(value).expect("report serializes");
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn run_dynamic(args: &RunArgs) -> Result<String, CliError> {
    let scenario = load(args)?;
    prepare_out(&args.io.out)?;
    let opts = RunOptions::from_scenario(&scenario);
    let run = dynamic::run(&scenario, &opts).map_err(|e| match e {
        DynamicError::CflViolation { .. } => CliError::validation("CFL condition", e),
        e => CliError::solver(SINGLE_CELL, e),
    })?;
    write_csv(&args.io.out.join("trajectory.csv"), output::dynamic_rows(scenario.grid(), &run))?;
    write_json(&args.io.out.join("ledger.json"), &json!({ "final": run.ledger, "history": run.ledger_history }))?;
    let d = &run.diagnostics;
    write_json(&args.io.out.join("report.json"), &json!({ "scenario": scenario.config().name, "diagnostics": d }))?;
    Ok(format!(
        "dynamic: {} steps, sup d = {:.3e}, relative energy residual = {:.3e}",
        d.steps, d.sup_distance, d.relative_energy_residual
    ))
}

fn run_quasistatic(args: &RunArgs) -> Result<String, CliError> {
    let scenario = load(args)?;
    let reduction = QsReduction::new(&scenario).map_err(|e| CliError::validation("quasi-static reduction", e))?;
    let forcing = reduction.forcing(scenario.t_end()) / scenario.compliance();
    prepare_out(&args.io.out)?;
    let tr = qs_evolve(&scenario, scenario.dt(), scenario.t_end()).map_err(|e| CliError::solver(SINGLE_CELL, e))?;
    let mut times = scenario.config().time.snapshots.clone();
    if times.is_empty() {
        times = (0..=10).map(|k| scenario.t_end() * k as f64 / 10.0).collect();
    }
    write_csv(&args.io.out.join("trajectory.csv"), output::quasistatic_rows(&scenario, &tr, &times))?;
    let saturation = saturation_distance(&scenario.scalar_potential().profile(), forcing).ok();
    let final_distance = scenario.scalar_potential().distance(tr.final_theta());
    write_json(
        &args.io.out.join("report.json"),
        &json!({
            "scenario": scenario.config().name,
            "steps": tr.t.len() - 1,
            "final_stress": tr.final_theta(),
            "final_distance": final_distance,
            "saturation_distance": saturation,
            "max_abs_energy_residual": tr.energy_residual.iter().fold(0.0_f64, |m, &r| m.max(r.abs())),
            "max_reconstruction_residual": tr.max_reconstruction_residual,
        }),
    )?;
    Ok(format!("quasistatic: {} steps, final stress = {:.10}, final d = {:.3e}", tr.t.len() - 1, tr.final_theta(), final_distance))
}

fn run_stationary(args: &RunArgs) -> Result<String, CliError> {
    let scenario = load(args)?;
    prepare_out(&args.io.out)?;
    let sol = solve_stationary(&scenario).map_err(|e| CliError::solver(SINGLE_CELL, e))?;
    let gap = sol.boundary_gap(scenario.grid(), scenario.right().displacement(0.0), lab::TRACE_DELTA);
    write_csv(&args.io.out.join("stationary.csv"), output::stationary_rows(&scenario, &sol, gap))?;
    let sigma_end = *sol.sigma.last().unwrap_or(&f64::NAN);
    let mass = sol.plastic_mass(0.95 * scenario.grid().length());
    write_json(
        &args.io.out.join("report.json"),
        &json!({
            "scenario": scenario.config().name,
            "iterations": sol.iterations,
            "residual": sol.residual,
            "continuation": sol.continuation,
            "stress_at_end": sigma_end,
            "boundary_gap": gap,
            "boundary_plastic_mass": mass,
        }),
    )?;
    Ok(format!("stationary: {} Newton iterations, sigma(L) = {sigma_end:.6}, boundary gap = {gap:.6}", sol.iterations))
}

fn run_exact(args: &ExactArgs) -> Result<String, CliError> {
    let mut config = load_config(&args.io.scenario)?;
    config.apply(&Overrides { t_end: args.t_end, ..Overrides::default() });
    if args.grid < 2 {
        return Err(CliError::validation("grid has at least two points", args.grid));
    }
    let length = config.grid.length;
    prepare_out(&args.io.out)?;
    let path = args.io.out.join("exact.csv");
    match config.exact {
        Some(ExactReference::Evolutionary { amplitude }) => {
            let t_end = config.time.t_end;
            let ee = EvolutionaryExact::new(length, amplitude, t_end)
                .map_err(|e| CliError::validation("exact solution parameters", e))?;
            let mut times = config.time.snapshots.clone();
            if times.is_empty() {
                times = (0..=10).map(|k| t_end * k as f64 / 10.0).collect();
            }
            write_csv(&path, output::evolutionary_rows(&ee, args.grid, &times))?;
            Ok(format!(
                "exact: onset t0 = {:.10}, boundary jump at T = {:.10}",
                ee.onset_time(),
                ee.boundary_jump(t_end)
            ))
        }
        Some(ExactReference::Stationary { boundary_value }) => {
            let se = StationaryExact::new(length, boundary_value)
                .map_err(|e| CliError::validation("exact solution parameters", e))?;
            write_csv(&path, output::stationary_exact_rows(&se, args.grid))?;
            Ok(format!("exact: stationary {:?}, boundary atom = {:.10}", se.regime(), se.atom()))
        }
        None => Err(CliError::validation("scenario has a closed-form reference", "no [exact] section")),
    }
}

fn run_sweep(args: &SweepArgs) -> Result<String, CliError> {
    let mut config = load_config(&args.io.scenario)?;
    config.apply(&Overrides { nodes: args.nx, dt: args.dt, t_end: args.t_end, ..Overrides::default() });
    // Validate the base scenario once so input errors are not reported per cell.
    Scenario::new(config.clone())?;
    let kind = match args.solver {
        Some(SolverArg::Dynamic) => SweepKind::Dynamic,
        Some(SolverArg::Stationary) => SweepKind::Stationary,
        Some(SolverArg::Quasistatic) => SweepKind::Quasistatic,
        None => SweepKind::infer(&config),
    };
    let mut plan = SweepPlan::new(config, kind, &args.alphas, args.lambda);
    plan.keep_csv = true;
    let report = lab::run_sweep(&plan).map_err(|e| match e {
        LabError::InvalidPlan { invariant, detail } => CliError::validation(invariant, detail),
        LabError::Scenario(e) => e.into(),
        LabError::ThreadPool(detail) => CliError::validation("thread pool", detail),
    })?;
    prepare_out(&args.io.out)?;
    for cell in &report.cells {
        if let Some(csv) = &cell.csv {
            write_file(&args.io.out.join(format!("{}.csv", cell.id)), csv.as_bytes())?;
        }
    }
    write_json(&args.io.out.join("report.json"), &report)?;
    if let Some(cell) = report.failed_cells().next() {
        let reason = match &cell.status {
            lab::CellStatus::Failed { reason } => reason.clone(),
            lab::CellStatus::Ok => String::new(),
        };
        return Err(CliError::solver(&cell.id, reason));
    }
    Ok(format!(
        "sweep: {} cells, sup d monotone = {}, interior H1 ratio = {}",
        report.cells.len(),
        report.trends.sup_distance_monotone,
        report.trends.h1_interior_sigma_ratio.map_or("n/a".into(), |r| format!("{r:.3}"))
    ))
}

fn verify_geometry(args: &GeometryArgs) -> Result<String, CliError> {
    let spec = match args.surface {
        SurfaceArg::Interval => SurfaceSpec::unit_interval(),
        SurfaceArg::VonMises => SurfaceSpec::VonMises { dim: args.dim, radius: args.radius },
        SurfaceArg::Hosford => SurfaceSpec::Hosford { dim: args.dim, p: args.p, scale: 1.0 },
    };
    let surface = YieldSurface::new(spec.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    surface.check_radii(args.samples, &mut rng)?;
    let curvature = surface.estimate_curvature(args.samples, &mut rng)?;
    let passed = surface.is_interval() || curvature.min_quotient.is_some_and(|q| q > 0.0);
    let report = json!({
        "surface": spec,
        "samples": args.samples,
        "seed": args.seed,
        "inner_radius": surface.inner_radius(),
        "outer_radius": surface.outer_radius(),
        "curvature": curvature,
        "passed": passed,
    });
    match &args.out {
        Some(dir) => {
            prepare_out(dir)?;
            write_json(&dir.join("geometry.json"), &report)?;
        }
        None => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
    }
    Ok(format!(
        "verify-geometry: min curvature quotient = {}",
        curvature.min_quotient.map_or("n/a".into(), |q| format!("{q:.6e}"))
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_overrides_and_ladders() {
        let cli = Cli::try_parse_from(["plastiflow", "dynamic", "--scenario", "s.cfg", "--alpha", "0.1", "--nx", "400"]).unwrap();
        let Command::Dynamic(a) = cli.command else { panic!() };
        assert_eq!(a.overrides.overrides(), Overrides { alpha: Some(0.1), nodes: Some(400), ..Overrides::default() });
        let cli = Cli::try_parse_from(["plastiflow", "sweep", "--scenario", "s.cfg", "--alphas", "0.3,0.1"]).unwrap();
        let Command::Sweep(a) = cli.command else { panic!() };
        assert_eq!(a.alphas, vec![0.3, 0.1]);
        assert!(Cli::try_parse_from(["plastiflow", "dynamic", "--scenario", "s.cfg", "--nx", "many"]).is_err());
    }

    #[test]
    fn missing_scenario_is_a_validation_error() {
        let code = run(["plastiflow", "stationary", "--scenario", "/nonexistent/file.cfg"]);
        assert_eq!(code, 1);
    }

    #[test]
    fn scenario_errors_keep_the_invariant() {
        let e: CliError = ScenarioError::Validation { invariant: "safe-load margin", detail: "c = 0".into() }.into();
        assert_eq!(e.exit_code(), 1);
        assert!(e.to_string().contains("safe-load margin"));
        assert_eq!(CliError::solver("cell-03", "diverged").exit_code(), 2);
    }
}
