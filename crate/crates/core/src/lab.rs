//! `(alpha, lambda)` sweeps: one solve per cell, run concurrently, then
//! trend diagnostics across the ladder.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamic::{self, left_limit_at_end, RunOptions, RunOutput};
use crate::exact::{EvolutionaryExact, StationaryExact};
use crate::output;
use crate::potential::ScalarPotential;
use crate::quasistatic::{qs_evolve, solve_stationary, QsTrajectory, StationarySolution};
use crate::scenario::{ExactReference, Grid1D, Overrides, Scenario, ScenarioConfig, ScenarioError};

/// Environment variable capping the number of sweep worker threads.
pub const THREADS_ENV: &str = "PLASTIFLOW_THREADS";
/// Distance from the end used to extrapolate the boundary trace.
pub const TRACE_DELTA: f64 = 0.05;
/// Relative slack allowed in the monotone trend of `sup d(sigma)`.
pub const TREND_SLACK: f64 = 0.1;
/// Bound on `max / min` of interior seminorms across the ladder.
pub const H1_RATIO_BOUND: f64 = 10.0;
/// Boundary-layer threshold as a multiple of the interior error.
pub const LAYER_FACTOR: f64 = 5.0;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("invalid sweep plan ({invariant}): {detail}")]
    InvalidPlan { invariant: &'static str, detail: String },
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
    #[error("thread pool: {0}")]
    ThreadPool(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepKind {
    Dynamic,
    Stationary,
    Quasistatic,
}

impl SweepKind {
    /// Stationary reference data selects the stationary solver, anything else
    /// runs the dynamic scheme.
    pub fn infer(config: &ScenarioConfig) -> Self {
        match config.exact {
            Some(ExactReference::Stationary { .. }) => SweepKind::Stationary,
            _ => SweepKind::Dynamic,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPlan {
    pub scenario: ScenarioConfig,
    pub kind: SweepKind,
    /// `(alpha, lambda)` per cell.
    pub cells: Vec<(f64, f64)>,
    pub interior_window: (f64, f64),
    /// Window touching the boundary, measured for contrast.
    pub boundary_window: Option<(f64, f64)>,
    pub probes: Vec<f64>,
    /// Start of the region whose plastic mass approximates the boundary atom.
    pub boundary_mass_from: f64,
    /// Keep the rendered per-cell CSV in the report (not serialized).
    pub keep_csv: bool,
}

impl SweepPlan {
    pub fn new(scenario: ScenarioConfig, kind: SweepKind, alphas: &[f64], lambda: f64) -> Self {
        let length = scenario.grid.length;
        SweepPlan {
            scenario,
            kind,
            cells: alphas.iter().map(|&a| (a, lambda)).collect(),
            interior_window: (0.2 * length, 0.8 * length),
            boundary_window: Some((0.9 * length, length)),
            probes: vec![0.25 * length, 0.5 * length, 0.75 * length],
            boundary_mass_from: 0.95 * length,
            keep_csv: false,
        }
    }

    /// `alpha` strictly decreasing, `lambda` non-decreasing, interior window
    /// strictly inside the domain.
    pub fn validate(&self) -> Result<(), LabError> {
        let invalid = |invariant, detail: String| Err(LabError::InvalidPlan { invariant, detail });
        if self.cells.is_empty() {
            return invalid("non-empty plan", "no cells".into());
        }
        for &(a, l) in &self.cells {
            if !(a > 0.0 && a <= 1.0) || !(l > 0.0 && l.is_finite()) {
                return invalid("cell parameters", format!("alpha = {a}, lambda = {l}"));
            }
        }
        for w in self.cells.windows(2) {
            if !(w[1].0 < w[0].0) {
                return invalid("alpha strictly decreasing", format!("{} then {}", w[0].0, w[1].0));
            }
            if w[1].1 < w[0].1 {
                return invalid("lambda non-decreasing", format!("{} then {}", w[0].1, w[1].1));
            }
        }
        let length = self.scenario.grid.length;
        let (lo, hi) = self.interior_window;
        if !(lo > 0.0 && lo < hi && hi < length) {
            return invalid("interior window", format!("({lo}, {hi}) not strictly inside (0, {length})"));
        }
        if let Some((lo, hi)) = self.boundary_window {
            if !(lo >= 0.0 && lo < hi && hi <= length) {
                return invalid("boundary window", format!("({lo}, {hi}) outside [0, {length}]"));
            }
        }
        if !(self.boundary_mass_from >= 0.0 && self.boundary_mass_from < length) {
            return invalid("boundary mass region", format!("start {} outside [0, {length})", self.boundary_mass_from));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "lowercase")]
pub enum CellStatus {
    Ok,
    Failed { reason: String },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct CellMetrics {
    /// `sup_t sup_x d(sigma)`.
    pub sup_distance: Option<f64>,
    /// Max normalized `H(dp) - sigma dp` over interior nodes and steps.
    pub flow_rule_residual: Option<f64>,
    pub h1_interior_sigma: Option<f64>,
    pub h1_interior_v: Option<f64>,
    pub h1_boundary_sigma: Option<f64>,
    pub h1_boundary_v: Option<f64>,
    /// Distance from `x = L` where `|u - exact|` first exceeds the interior
    /// error times the layer factor.
    pub boundary_layer_width: Option<f64>,
    pub relative_energy_residual: Option<f64>,
    /// `alpha * sup_t int (1 + d^2 ^ lambda^2)^(1/(2 alpha) + 1/2)`.
    pub scaled_uniform_estimate: Option<f64>,
    /// Dynamic: `w(T, L) - u(T, L-)`; stationary: `u(L-) - u(L)`.
    pub boundary_gap: Option<f64>,
    pub first_yield_time: Option<f64>,
    pub boundary_plastic_mass: Option<f64>,
    /// `sigma(L)` at the final time.
    pub stress_at_end: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub id: String,
    pub alpha: f64,
    pub lambda: f64,
    #[serde(flatten)]
    pub status: CellStatus,
    pub metrics: CellMetrics,
    #[serde(skip)]
    pub csv: Option<String>,
}

impl CellReport {
    pub fn is_ok(&self) -> bool {
        self.status == CellStatus::Ok
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Trends {
    /// `sup d` never grows by more than the slack between consecutive cells.
    pub sup_distance_monotone: bool,
    /// `log(d_i / d_{i+1}) / log(alpha_i / alpha_{i+1})` per consecutive pair.
    pub observed_distance_rates: Vec<f64>,
    pub h1_interior_sigma_ratio: Option<f64>,
    pub h1_interior_v_ratio: Option<f64>,
    pub h1_boundary_sigma_ratio: Option<f64>,
    pub h1_boundary_v_ratio: Option<f64>,
    pub h1_interior_bounded: bool,
    /// `C = max_i I_i / (1 + 1/alpha_i)` for the scaled uniform estimate.
    pub fitted_constant: Option<f64>,
    /// `max / min` of `I_i / (1 + 1/alpha_i)`.
    pub fit_spread: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LimitReport {
    pub scenario: String,
    pub kind: SweepKind,
    pub cells: Vec<CellReport>,
    pub trends: Trends,
}

impl LimitReport {
    pub fn failed_cells(&self) -> impl Iterator<Item = &CellReport> {
        self.cells.iter().filter(|c| !c.is_ok())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// Max over entries of the normalized flow-rule defect; zero increments are skipped.
pub fn flow_rule_residual(potential: &ScalarPotential, sigma: &[f64], dp: &[f64]) -> f64 {
    sigma.iter().zip(dp).map(|(&s, &q)| potential.flow_rule_defect(s, q)).fold(0.0, f64::max)
}

/// Thread count from the environment, if set to a positive integer.
pub fn thread_cap() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n: &usize| n > 0)
}

/// Runs every cell (concurrently) and aggregates the trends. Cell failures
/// are recorded and do not stop the sweep.
pub fn run_sweep(plan: &SweepPlan) -> Result<LimitReport, LabError> {
    plan.validate()?;
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = thread_cap() {
        builder = builder.num_threads(n);
    }
    let pool = builder.build().map_err(|e| LabError::ThreadPool(e.to_string()))?;
    let cells: Vec<CellReport> = pool.install(|| {
        plan.cells
            .par_iter()
            .enumerate()
            .map(|(i, &(alpha, lambda))| run_cell(plan, i, alpha, lambda))
            .collect()
    });
    let trends = trends(&cells);
    Ok(LimitReport { scenario: plan.scenario.name.clone(), kind: plan.kind, cells, trends })
}

fn run_cell(plan: &SweepPlan, index: usize, alpha: f64, lambda: f64) -> CellReport {
    let id = format!("cell-{index:02}");
    let mut config = plan.scenario.clone();
    config.apply(&Overrides { alpha: Some(alpha), lambda: Some(lambda), ..Overrides::default() });
    let outcome = Scenario::new(config).map_err(|e| e.to_string()).and_then(|scenario| match plan.kind {
        SweepKind::Dynamic => dynamic_cell(plan, &scenario),
        SweepKind::Stationary => stationary_cell(plan, &scenario),
        SweepKind::Quasistatic => quasistatic_cell(&scenario),
    });
    match outcome {
        Ok((metrics, csv)) => CellReport { id, alpha, lambda, status: CellStatus::Ok, metrics, csv },
        Err(reason) => CellReport { id, alpha, lambda, status: CellStatus::Failed { reason }, metrics: CellMetrics::default(), csv: None },
    }
}

type CellOutcome = Result<(CellMetrics, Option<String>), String>;

fn render<R: Serialize>(rows: Vec<R>) -> Result<String, String> {
    let mut buf = Vec::new();
    output::write_rows(&mut buf, rows).map_err(|e| e.to_string())?;
    String::from_utf8(buf).map_err(|e| e.to_string())
}

fn dynamic_cell(plan: &SweepPlan, scenario: &Scenario) -> CellOutcome {
    let mut opts = RunOptions::from_scenario(scenario);
    opts.probes = plan.probes.clone();
    opts.windows = vec![plan.interior_window];
    opts.windows.extend(plan.boundary_window);
    let run = dynamic::run(scenario, &opts).map_err(|e| e.to_string())?;
    let d = &run.diagnostics;
    let interior = d.h1.first();
    let boundary = plan.boundary_window.and(d.h1.get(1));
    let grid = scenario.grid();
    let state = &run.final_state;
    let metrics = CellMetrics {
        sup_distance: Some(d.sup_distance),
        flow_rule_residual: Some(d.flow_rule_residual),
        h1_interior_sigma: interior.map(|w| w.sigma),
        h1_interior_v: interior.map(|w| w.v),
        h1_boundary_sigma: boundary.map(|w| w.sigma),
        h1_boundary_v: boundary.map(|w| w.v),
        boundary_layer_width: dynamic_layer_width(plan, scenario, &run),
        relative_energy_residual: Some(d.relative_energy_residual),
        scaled_uniform_estimate: Some(scenario.potential().alpha() * d.estimate_uniform),
        boundary_gap: Some(scenario.right().displacement(state.t) - left_limit_at_end(grid, &state.u, TRACE_DELTA)),
        first_yield_time: d.first_yield_time,
        boundary_plastic_mass: Some(tail_mass(grid, &state.p, plan.boundary_mass_from)),
        stress_at_end: state.sigma.last().copied(),
    };
    let csv = if plan.keep_csv { Some(render(output::dynamic_rows(grid, &run))?) } else { None };
    Ok((metrics, csv))
}

fn dynamic_layer_width(plan: &SweepPlan, scenario: &Scenario, run: &RunOutput) -> Option<f64> {
    let Some(ExactReference::Evolutionary { amplitude }) = scenario.config().exact else {
        return None;
    };
    let grid = scenario.grid();
    let t = run.final_state.t;
    let ee = EvolutionaryExact::new(grid.length(), amplitude, t.max(scenario.t_end())).ok()?;
    let err: Vec<f64> = grid.x().iter().zip(&run.final_state.u).map(|(&x, &u)| (u - ee.eval(t, x).u).abs()).collect();
    Some(layer_width(grid, &err, plan.interior_window))
}

/// Scans outward from the interior window toward `x = L`; the first node whose
/// error exceeds the layer factor times the interior error fixes the width.
fn layer_width(grid: &Grid1D, err: &[f64], window: (f64, f64)) -> f64 {
    let range = grid.window(window.0, window.1);
    let interior = err[range.clone()].iter().copied().fold(0.0, f64::max);
    let threshold = LAYER_FACTOR * interior.max(f64::EPSILON);
    (*range.end()..grid.nodes())
        .find(|&k| err[k] > threshold)
        .map_or(0.0, |k| grid.length() - grid.x()[k])
}

fn tail_mass(grid: &Grid1D, values: &[f64], from: f64) -> f64 {
    let range = grid.window(from, grid.length());
    let v = &values[range];
    if v.len() < 2 {
        return 0.0;
    }
    grid.dx() * (v.iter().sum::<f64>() - 0.5 * (v[0] + v[v.len() - 1]))
}

fn stationary_cell(plan: &SweepPlan, scenario: &Scenario) -> CellOutcome {
    let sol = solve_stationary(scenario).map_err(|e| e.to_string())?;
    let grid = scenario.grid();
    let pot = scenario.scalar_potential();
    let h1 = |w: (f64, f64)| dynamic::interior_h1_seminorm(grid, &sol.sigma, w).ok();
    let wl = scenario.right().displacement(0.0);
    let gap = sol.boundary_gap(grid, wl, TRACE_DELTA);
    let metrics = CellMetrics {
        sup_distance: Some(sol.sigma.iter().map(|&s| pot.distance(s)).fold(0.0, f64::max)),
        flow_rule_residual: Some(flow_rule_residual(pot, &sol.sigma, &sol.plastic)),
        h1_interior_sigma: h1(plan.interior_window),
        h1_boundary_sigma: plan.boundary_window.and_then(h1),
        boundary_layer_width: stationary_layer_width(plan, scenario, &sol),
        boundary_gap: Some(gap),
        boundary_plastic_mass: Some(sol.plastic_mass(plan.boundary_mass_from)),
        stress_at_end: sol.sigma.last().copied(),
        ..CellMetrics::default()
    };
    let csv = if plan.keep_csv { Some(render(output::stationary_rows(scenario, &sol, gap))?) } else { None };
    Ok((metrics, csv))
}

fn stationary_layer_width(plan: &SweepPlan, scenario: &Scenario, sol: &StationarySolution) -> Option<f64> {
    let Some(ExactReference::Stationary { boundary_value }) = scenario.config().exact else {
        return None;
    };
    let grid = scenario.grid();
    let se = StationaryExact::new(grid.length(), boundary_value).ok()?;
    let err: Vec<f64> = sol.x.iter().zip(&sol.u).map(|(&x, &u)| (u - se.eval(x).u).abs()).collect();
    Some(layer_width(grid, &err, plan.interior_window))
}

fn quasistatic_cell(scenario: &Scenario) -> CellOutcome {
    let tr = qs_evolve(scenario, scenario.dt(), scenario.t_end()).map_err(|e| e.to_string())?;
    let pot = scenario.scalar_potential();
    let dp: Vec<f64> = tr.plastic.windows(2).map(|w| w[1] - w[0]).collect();
    let metrics = CellMetrics {
        sup_distance: Some(tr.theta.iter().map(|&s| pot.distance(s)).fold(0.0, f64::max)),
        flow_rule_residual: Some(flow_rule_residual(pot, &tr.theta[1..], &dp)),
        h1_interior_sigma: Some(0.0),
        relative_energy_residual: Some(qs_relative_residual(&tr)),
        stress_at_end: Some(tr.final_theta()),
        ..CellMetrics::default()
    };
    Ok((metrics, None))
}

fn qs_relative_residual(tr: &QsTrajectory) -> f64 {
    let scale = tr.work.iter().chain(&tr.dissipation).fold(0.0_f64, |m, &v| m.max(v.abs()));
    let worst = tr.energy_residual.iter().fold(0.0_f64, |m, &v| m.max(v.abs()));
    if scale > 0.0 {
        worst / scale
    } else {
        worst
    }
}

fn ratio(values: impl Iterator<Item = Option<f64>>) -> Option<f64> {
    let v: Vec<f64> = values.collect::<Option<Vec<_>>>()?;
    if v.is_empty() {
        return None;
    }
    let max = v.iter().copied().fold(f64::MIN, f64::max);
    let min = v.iter().copied().fold(f64::MAX, f64::min);
    match (max > 0.0, min > 0.0) {
        (false, _) => Some(1.0),
        (true, false) => None,
        (true, true) => Some(max / min),
    }
}

fn trends(cells: &[CellReport]) -> Trends {
    let ok: Vec<&CellReport> = cells.iter().filter(|c| c.is_ok()).collect();
    let dist: Vec<(f64, f64)> = ok.iter().filter_map(|c| c.metrics.sup_distance.map(|d| (c.alpha, d))).collect();
    let sup_distance_monotone = dist.windows(2).all(|w| w[1].1 <= (1.0 + TREND_SLACK) * w[0].1 + 1e-12);
    let observed_distance_rates = dist
        .windows(2)
        .filter(|w| w[0].1 > 0.0 && w[1].1 > 0.0)
        .map(|w| (w[0].1 / w[1].1).ln() / (w[0].0 / w[1].0).ln())
        .collect();
    let h1_interior_sigma_ratio = ratio(ok.iter().map(|c| c.metrics.h1_interior_sigma));
    let quotients: Vec<f64> = ok
        .iter()
        .filter_map(|c| c.metrics.scaled_uniform_estimate.map(|i| i / (1.0 + 1.0 / c.alpha)))
        .collect();
    let fitted_constant = (!quotients.is_empty()).then(|| quotients.iter().copied().fold(0.0, f64::max));
    Trends {
        sup_distance_monotone,
        observed_distance_rates,
        h1_interior_sigma_ratio,
        h1_interior_v_ratio: ratio(ok.iter().map(|c| c.metrics.h1_interior_v)),
        h1_boundary_sigma_ratio: ratio(ok.iter().map(|c| c.metrics.h1_boundary_sigma)),
        h1_boundary_v_ratio: ratio(ok.iter().map(|c| c.metrics.h1_boundary_v)),
        h1_interior_bounded: h1_interior_sigma_ratio.is_some_and(|r| r <= H1_RATIO_BOUND),
        fitted_constant,
        fit_spread: ratio(quotients.iter().map(|&q| Some(q))),
    }
}
