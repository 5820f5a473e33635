//! Scenario description for the 1D solvers: grid, material, yield interval,
//! potential parameters, loads, boundary data and initial fields.
//!
//! A scenario is read from TOML. Time-dependent data are named built-in
//! functions with parameters; there is no expression language.
//!
//! ```toml
//! [grid]
//! length = 1.0
//! nodes = 401
//!
//! [potential]
//! alpha = 0.05
//! lambda = 1000.0
//!
//! [boundary.right]
//! kind = "dirichlet"
//! displacement = { kind = "exponential", amplitude = 0.5 }
//! ```

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, SurfaceSpec, YieldSurface};
use crate::potential::{PotentialError, RegularizedPotential, ScalarPotential};

pub const DEFAULT_SEED: u64 = 20_240_917;
const MIN_NODES: usize = 16;
/// Number of time samples used when validating the safe-load condition.
const SAFE_LOAD_SAMPLES: usize = 65;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ScenarioError {
    #[error("cannot parse scenario: {0}")]
    Parse(String),
    #[error("{invariant} violated: {detail}")]
    Validation { invariant: &'static str, detail: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Potential(#[from] PotentialError),
}

fn invalid(invariant: &'static str, detail: impl Into<String>) -> ScenarioError {
    ScenarioError::Validation { invariant, detail: detail.into() }
}

fn one() -> f64 {
    1.0
}

/// Scalar function of time.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeFunction {
    Constant {
        value: f64,
    },
    /// `offset + slope t`
    Linear {
        #[serde(default)]
        offset: f64,
        slope: f64,
    },
    /// `amplitude exp(rate t)`
    Exponential {
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
    },
    /// `offset + amplitude sin(omega t + phase)`
    Sinusoid {
        amplitude: f64,
        omega: f64,
        #[serde(default)]
        phase: f64,
        #[serde(default)]
        offset: f64,
    },
}

impl Default for TimeFunction {
    fn default() -> Self {
        TimeFunction::Constant { value: 0.0 }
    }
}

impl TimeFunction {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn value(&self, t: f64) -> f64 {
        match *self {
            TimeFunction::Constant { value } => value,
            TimeFunction::Linear { offset, slope } => offset + slope * t,
            TimeFunction::Exponential { amplitude, rate } => amplitude * (rate * t).exp(),
            TimeFunction::Sinusoid { amplitude, omega, phase, offset } => offset + amplitude * (omega * t + phase).sin(),
        }
    }

    pub fn rate(&self, t: f64) -> f64 {
        match *self {
            TimeFunction::Constant { .. } => 0.0,
            TimeFunction::Linear { slope, .. } => slope,
            TimeFunction::Exponential { amplitude, rate } => amplitude * rate * (rate * t).exp(),
            TimeFunction::Sinusoid { amplitude, omega, phase, .. } => amplitude * omega * (omega * t + phase).cos(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            TimeFunction::Constant { value } => value == 0.0,
            TimeFunction::Linear { offset, slope } => offset == 0.0 && slope == 0.0,
            TimeFunction::Exponential { amplitude, .. } => amplitude == 0.0,
            TimeFunction::Sinusoid { amplitude, offset, .. } => amplitude == 0.0 && offset == 0.0,
        }
    }
}

/// Scalar function of position. `Cosh` and `Sinh` may be normalized by
/// `sinh(sinh_norm)`.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Profile {
    #[default]
    Zero,
    Constant {
        value: f64,
    },
    Linear {
        #[serde(default)]
        offset: f64,
        slope: f64,
    },
    Cosh {
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sinh_norm: Option<f64>,
    },
    Sinh {
        amplitude: f64,
        #[serde(default = "one")]
        rate: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        sinh_norm: Option<f64>,
    },
    Sin {
        amplitude: f64,
        wavenumber: f64,
    },
    Cos {
        amplitude: f64,
        wavenumber: f64,
    },
}

fn norm_factor(sinh_norm: Option<f64>) -> f64 {
    sinh_norm.map_or(1.0, |l| 1.0 / l.sinh())
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero => 0.0,
            Profile::Constant { value } => value,
            Profile::Linear { offset, slope } => offset + slope * x,
            Profile::Cosh { amplitude, rate, sinh_norm } => amplitude * norm_factor(sinh_norm) * (rate * x).cosh(),
            Profile::Sinh { amplitude, rate, sinh_norm } => amplitude * norm_factor(sinh_norm) * (rate * x).sinh(),
            Profile::Sin { amplitude, wavenumber } => amplitude * (wavenumber * x).sin(),
            Profile::Cos { amplitude, wavenumber } => amplitude * (wavenumber * x).cos(),
        }
    }

    pub fn derivative(&self, x: f64) -> f64 {
        match *self {
            Profile::Zero | Profile::Constant { .. } => 0.0,
            Profile::Linear { slope, .. } => slope,
            Profile::Cosh { amplitude, rate, sinh_norm } => amplitude * norm_factor(sinh_norm) * rate * (rate * x).sinh(),
            Profile::Sinh { amplitude, rate, sinh_norm } => amplitude * norm_factor(sinh_norm) * rate * (rate * x).cosh(),
            Profile::Sin { amplitude, wavenumber } => amplitude * wavenumber * (wavenumber * x).cos(),
            Profile::Cos { amplitude, wavenumber } => -amplitude * wavenumber * (wavenumber * x).sin(),
        }
    }

    pub fn is_zero(&self) -> bool {
        match *self {
            Profile::Zero => true,
            Profile::Constant { value } => value == 0.0,
            Profile::Linear { offset, slope } => offset == 0.0 && slope == 0.0,
            Profile::Cosh { amplitude, .. }
            | Profile::Sinh { amplitude, .. }
            | Profile::Sin { amplitude, .. }
            | Profile::Cos { amplitude, .. } => amplitude == 0.0,
        }
    }
}

/// Separable space-time field `time(t) * space(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Field {
    #[serde(default = "unit_time")]
    pub time: TimeFunction,
    pub space: Profile,
}

fn unit_time() -> TimeFunction {
    TimeFunction::Constant { value: 1.0 }
}

impl Field {
    pub fn value(&self, t: f64, x: f64) -> f64 {
        self.time.value(t) * self.space.value(x)
    }

    pub fn dx(&self, t: f64, x: f64) -> f64 {
        self.time.value(t) * self.space.derivative(x)
    }

    pub fn dt(&self, t: f64, x: f64) -> f64 {
        self.time.rate(t) * self.space.value(x)
    }

    pub fn is_zero(&self) -> bool {
        self.time.is_zero() || self.space.is_zero()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BoundaryCondition {
    /// Prescribed displacement `w(t)`; the velocity is pinned to `w'(t)`.
    Dirichlet { displacement: TimeFunction },
    /// Prescribed traction `sigma nu = g(t)`.
    Neumann { traction: TimeFunction },
}

impl Default for BoundaryCondition {
    fn default() -> Self {
        BoundaryCondition::Dirichlet { displacement: TimeFunction::zero() }
    }
}

impl BoundaryCondition {
    pub fn is_dirichlet(&self) -> bool {
        matches!(self, BoundaryCondition::Dirichlet { .. })
    }

    /// Displacement datum, zero on traction ends (used by the lift).
    pub fn displacement(&self, t: f64) -> f64 {
        match self {
            BoundaryCondition::Dirichlet { displacement } => displacement.value(t),
            BoundaryCondition::Neumann { .. } => 0.0,
        }
    }

    pub fn velocity(&self, t: f64) -> f64 {
        match self {
            BoundaryCondition::Dirichlet { displacement } => displacement.rate(t),
            BoundaryCondition::Neumann { .. } => 0.0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub length: f64,
    pub nodes: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialConfig {
    /// Elastic compliance `a` (inverse stiffness); unit density.
    #[serde(default = "one")]
    pub compliance: f64,
}

impl Default for MaterialConfig {
    fn default() -> Self {
        MaterialConfig { compliance: 1.0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialConfig {
    pub alpha: f64,
    pub lambda: f64,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryConfig {
    #[serde(default)]
    pub left: BoundaryCondition,
    #[serde(default)]
    pub right: BoundaryCondition,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LoadConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub body_force: Option<Field>,
    /// Load potential: `-rho' = f` in the interior and `rho nu = g` on traction ends.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rho: Option<Field>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub safe_load_margin: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialConfig {
    #[serde(default)]
    pub sigma: Profile,
    #[serde(default)]
    pub velocity: Profile,
    #[serde(default)]
    pub displacement: Profile,
    /// Ask for `-sigma0' = f(0)` at interior nodes.
    #[serde(default)]
    pub require_equilibrium: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeConfig {
    pub t_end: f64,
    /// Explicit step; defaults to `cfl * dx * sqrt(a)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default = "default_cfl")]
    pub cfl: f64,
    #[serde(default)]
    pub probes: Vec<f64>,
    #[serde(default)]
    pub snapshots: Vec<f64>,
    /// Windows `[x_lo, x_hi]` for the H1 seminorm diagnostics.
    #[serde(default)]
    pub windows: Vec<[f64; 2]>,
}

fn default_cfl() -> f64 {
    0.9
}

impl Default for TimeConfig {
    fn default() -> Self {
        TimeConfig { t_end: 1.0, dt: None, cfl: default_cfl(), probes: Vec::new(), snapshots: Vec::new(), windows: Vec::new() }
    }
}

/// Closed-form reference attached to a scenario.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ExactReference {
    /// Stationary problem with `u(0) = 0`, `u(L) = boundary_value`.
    Stationary { boundary_value: f64 },
    /// Exponential ramp `w(t, L) = amplitude e^t`.
    Evolutionary { amplitude: f64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default = "default_name")]
    pub name: String,
    #[serde(default = "default_seed")]
    pub seed: u64,
    pub grid: GridConfig,
    #[serde(default)]
    pub material: MaterialConfig,
    #[serde(default = "SurfaceSpec::unit_interval")]
    pub surface: SurfaceSpec,
    pub potential: PotentialConfig,
    #[serde(default)]
    pub boundary: BoundaryConfig,
    #[serde(default)]
    pub loads: LoadConfig,
    #[serde(default)]
    pub initial: InitialConfig,
    #[serde(default)]
    pub time: TimeConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact: Option<ExactReference>,
}

fn default_name() -> String {
    "scenario".into()
}

fn default_seed() -> u64 {
    DEFAULT_SEED
}

/// Command-line style overrides applied before validation.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Overrides {
    pub alpha: Option<f64>,
    pub lambda: Option<f64>,
    pub nodes: Option<usize>,
    pub dt: Option<f64>,
    pub t_end: Option<f64>,
}

impl ScenarioConfig {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        toml::from_str(text).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn to_toml(&self) -> Result<String, ScenarioError> {
        toml::to_string(self).map_err(|e| ScenarioError::Parse(e.to_string()))
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(a) = o.alpha {
            self.potential.alpha = a;
        }
        if let Some(l) = o.lambda {
            self.potential.lambda = l;
        }
        if let Some(n) = o.nodes {
            self.grid.nodes = n;
        }
        if let Some(dt) = o.dt {
            self.time.dt = Some(dt);
        }
        if let Some(t) = o.t_end {
            self.time.t_end = t;
        }
    }

    /// The exponential-ramp example: `L = 1`, `w(t, 0) = 0`,
    /// `w(t, L) = amplitude e^t`, elastic initial data, `K = [-1, 1]`, `a = 1`.
    pub fn exponential_ramp(amplitude: f64, nodes: usize, alpha: f64, lambda: f64, t_end: f64) -> Self {
        let length = 1.0;
        ScenarioConfig {
            name: "exponential-ramp".into(),
            seed: DEFAULT_SEED,
            grid: GridConfig { length, nodes },
            material: MaterialConfig::default(),
            surface: SurfaceSpec::unit_interval(),
            potential: PotentialConfig { alpha, lambda },
            boundary: BoundaryConfig {
                left: BoundaryCondition::Dirichlet { displacement: TimeFunction::zero() },
                right: BoundaryCondition::Dirichlet {
                    displacement: TimeFunction::Exponential { amplitude, rate: 1.0 },
                },
            },
            loads: LoadConfig::default(),
            initial: InitialConfig {
                sigma: Profile::Cosh { amplitude, rate: 1.0, sinh_norm: Some(length) },
                velocity: Profile::Sinh { amplitude, rate: 1.0, sinh_norm: Some(length) },
                displacement: Profile::Sinh { amplitude, rate: 1.0, sinh_norm: Some(length) },
                require_equilibrium: false,
            },
            time: TimeConfig { t_end, ..TimeConfig::default() },
            exact: Some(ExactReference::Evolutionary { amplitude }),
        }
    }
}

/// Uniform grid on `[0, L]`.
#[derive(Clone, Debug, PartialEq)]
pub struct Grid1D {
    length: f64,
    dx: f64,
    x: Vec<f64>,
}

impl Grid1D {
    pub fn new(length: f64, nodes: usize) -> Result<Self, ScenarioError> {
        if !(length > 0.0) || !length.is_finite() {
            return Err(invalid("grid length", format!("length must be positive, got {length}")));
        }
        if nodes < MIN_NODES {
            return Err(invalid("grid size", format!("at least {MIN_NODES} nodes are needed, got {nodes}")));
        }
        let dx = length / (nodes - 1) as f64;
        let mut x: Vec<f64> = (0..nodes).map(|k| k as f64 * dx).collect();
        x[nodes - 1] = length;
        Ok(Grid1D { length, dx, x })
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.dx
    }

    pub fn nodes(&self) -> usize {
        self.x.len()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// Linear interpolation of nodal values at `x` (clamped to the domain).
    pub fn interpolate(&self, values: &[f64], x: f64) -> f64 {
        let s = (x / self.dx).clamp(0.0, (self.nodes() - 1) as f64);
        let k = (s.floor() as usize).min(self.nodes() - 2);
        let w = s - k as f64;
        values[k] * (1.0 - w) + values[k + 1] * w
    }

    /// Linear lift `f0 (1 - x/L) + f1 x/L`.
    pub fn lift(&self, f0: f64, f1: f64, x: f64) -> f64 {
        f0 + (f1 - f0) * x / self.length
    }

    /// Second-order derivative: central inside, one-sided `(-3, 4, -1)` at the ends.
    pub fn derivative(&self, f: &[f64], out: &mut [f64]) {
        let n = f.len();
        let h = 0.5 / self.dx;
        out[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) * h;
        out[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) * h;
        for k in 1..n - 1 {
            out[k] = (f[k + 1] - f[k - 1]) * h;
        }
    }

    /// Trapezoid rule over the whole grid.
    pub fn integrate(&self, f: &[f64]) -> f64 {
        let n = f.len();
        let inner: f64 = f[1..n - 1].iter().sum();
        self.dx * (inner + 0.5 * (f[0] + f[n - 1]))
    }

    pub fn integrate_with<F: Fn(usize) -> f64>(&self, f: F) -> f64 {
        let n = self.nodes();
        let inner: f64 = (1..n - 1).map(&f).sum();
        self.dx * (inner + 0.5 * (f(0) + f(n - 1)))
    }

    /// Indices of the nodes lying in `[lo, hi]`.
    pub fn window(&self, lo: f64, hi: f64) -> std::ops::RangeInclusive<usize> {
        let eps = 1e-9 * self.dx;
        let first = ((lo - eps) / self.dx).ceil().max(0.0) as usize;
        let last = (((hi + eps) / self.dx).floor() as usize).min(self.nodes() - 1);
        first..=last
    }
}

/// A validated scenario.
#[derive(Clone, Debug)]
pub struct Scenario {
    config: ScenarioConfig,
    grid: Grid1D,
    potential: RegularizedPotential,
    scalar: ScalarPotential,
    safe_load_margin: f64,
}

impl Scenario {
    pub fn from_toml(text: &str) -> Result<Self, ScenarioError> {
        Scenario::new(ScenarioConfig::from_toml(text)?)
    }

    pub fn new(config: ScenarioConfig) -> Result<Self, ScenarioError> {
        let grid = Grid1D::new(config.grid.length, config.grid.nodes)?;
        let a = config.material.compliance;
        if !(a > 0.0) || !a.is_finite() {
            return Err(invalid("positive compliance", format!("compliance must be positive, got {a}")));
        }
        if !matches!(config.surface, SurfaceSpec::Interval { .. }) {
            return Err(invalid("1D yield set", "the 1D solvers need an interval surface"));
        }
        let surface = YieldSurface::new(config.surface.clone())?;
        let potential = RegularizedPotential::new(config.potential.alpha, config.potential.lambda, surface)?;
        let scalar = potential.scalar()?;
        let t = &config.time;
        if !(t.t_end > 0.0) || !t.t_end.is_finite() {
            return Err(invalid("final time", format!("t_end must be positive, got {}", t.t_end)));
        }
        if !(t.cfl > 0.0 && t.cfl <= 0.9) {
            return Err(invalid("CFL factor", format!("cfl must lie in (0, 0.9], got {}", t.cfl)));
        }
        if let Some(dt) = t.dt {
            if !(dt > 0.0) {
                return Err(invalid("time step", format!("dt must be positive, got {dt}")));
            }
        }
        for &[lo, hi] in &t.windows {
            if !(0.0 <= lo && lo < hi && hi <= grid.length()) {
                return Err(invalid("window inside the domain", format!("[{lo}, {hi}] is not a window of [0, {}]", grid.length())));
            }
        }
        let mut scenario = Scenario { config, grid, potential, scalar, safe_load_margin: 0.0 };
        scenario.safe_load_margin = scenario.check_safe_load()?;
        scenario.check_initial_data()?;
        Ok(scenario)
    }

    fn check_safe_load(&self) -> Result<f64, ScenarioError> {
        let cfg = &self.config;
        let r_k = self.scalar.inner_radius();
        let f = cfg.loads.body_force.as_ref().filter(|f| !f.is_zero());
        let traction_ends = !cfg.boundary.left.is_dirichlet() || !cfg.boundary.right.is_dirichlet();
        let Some(rho) = cfg.loads.rho.as_ref() else {
            if f.is_some() || traction_ends {
                return Err(invalid(
                    "safe-load condition",
                    "a load potential rho is required with body forces or traction boundaries",
                ));
            }
            return Ok(r_k);
        };
        let mut margin = f64::INFINITY;
        for i in 0..SAFE_LOAD_SAMPLES {
            let t = cfg.time.t_end * i as f64 / (SAFE_LOAD_SAMPLES - 1) as f64;
            for &x in self.grid.x() {
                margin = margin.min(r_k - rho.value(t, x).abs());
                let force = f.map_or(0.0, |f| f.value(t, x));
                if (rho.dx(t, x) + force).abs() > 1e-9 * (1.0 + force.abs()) {
                    return Err(invalid("load potential", format!("-rho' != f at t = {t}, x = {x}")));
                }
            }
            for (bc, x, normal) in [(&cfg.boundary.left, 0.0, -1.0), (&cfg.boundary.right, self.grid.length(), 1.0)] {
                if let BoundaryCondition::Neumann { traction } = bc {
                    let g = traction.value(t);
                    if (rho.value(t, x) * normal - g).abs() > 1e-9 * (1.0 + g.abs()) {
                        return Err(invalid("load potential", format!("rho nu != g at t = {t}, x = {x}")));
                    }
                }
            }
        }
        let required = cfg.loads.safe_load_margin.unwrap_or(0.0);
        if !(margin > 0.0) || margin < required {
            return Err(invalid(
                "safe-load margin",
                format!("r_K - max|rho| = {margin:.6} but the margin must be positive and at least {required}"),
            ));
        }
        Ok(margin)
    }

    fn check_initial_data(&self) -> Result<(), ScenarioError> {
        let cfg = &self.config;
        let init = &cfg.initial;
        for (bc, x) in [(&cfg.boundary.left, 0.0), (&cfg.boundary.right, self.grid.length())] {
            if let BoundaryCondition::Dirichlet { displacement } = bc {
                let (v0, wdot) = (init.velocity.value(x), displacement.rate(0.0));
                if (v0 - wdot).abs() > 1e-9 * (1.0 + wdot.abs()) {
                    return Err(invalid("initial velocity compatibility", format!("v0({x}) = {v0} but w'(0) = {wdot}")));
                }
            }
        }
        for &x in self.grid.x() {
            let s = init.sigma.value(x);
            if self.scalar.distance(s) > 1e-12 {
                return Err(invalid("admissible initial stress", format!("sigma0({x}) = {s} lies outside K")));
            }
        }
        if init.require_equilibrium {
            let f = cfg.loads.body_force.as_ref();
            for &x in &self.grid.x()[1..self.grid.nodes() - 1] {
                let force = f.map_or(0.0, |f| f.value(0.0, x));
                let r = init.sigma.derivative(x) + force;
                if r.abs() > 1e-9 * (1.0 + force.abs()) {
                    return Err(invalid("initial equilibrium", format!("-sigma0' - f(0) = {r:e} at x = {x}")));
                }
            }
        }
        Ok(())
    }

    pub fn config(&self) -> &ScenarioConfig {
        &self.config
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn compliance(&self) -> f64 {
        self.config.material.compliance
    }

    pub fn potential(&self) -> &RegularizedPotential {
        &self.potential
    }

    pub fn scalar_potential(&self) -> &ScalarPotential {
        &self.scalar
    }

    pub fn safe_load_margin(&self) -> f64 {
        self.safe_load_margin
    }

    pub fn left(&self) -> &BoundaryCondition {
        &self.config.boundary.left
    }

    pub fn right(&self) -> &BoundaryCondition {
        &self.config.boundary.right
    }

    /// Largest stable step, `0.9 dx sqrt(a)`.
    pub fn max_stable_dt(&self) -> f64 {
        0.9 * self.grid.dx() * self.compliance().sqrt()
    }

    pub fn dt(&self) -> f64 {
        self.config.time.dt.unwrap_or(self.config.time.cfl * self.grid.dx() * self.compliance().sqrt())
    }

    pub fn t_end(&self) -> f64 {
        self.config.time.t_end
    }

    pub fn body_force(&self, t: f64, x: f64) -> f64 {
        self.config.loads.body_force.as_ref().map_or(0.0, |f| f.value(t, x))
    }

    pub fn rho(&self, t: f64, x: f64) -> f64 {
        self.config.loads.rho.as_ref().map_or(0.0, |r| r.value(t, x))
    }

    pub fn has_rho(&self) -> bool {
        self.config.loads.rho.as_ref().is_some_and(|r| !r.is_zero())
    }

    /// Lifted boundary displacement `w(t, x)`.
    pub fn lift(&self, t: f64, x: f64) -> f64 {
        self.grid.lift(self.left().displacement(t), self.right().displacement(t), x)
    }

    /// Lifted boundary velocity `w'(t, x)`.
    pub fn lift_rate(&self, t: f64, x: f64) -> f64 {
        self.grid.lift(self.left().velocity(t), self.right().velocity(t), x)
    }

    /// Spatial derivative of the lifted velocity (constant in `x`).
    pub fn lift_rate_slope(&self, t: f64) -> f64 {
        (self.right().velocity(t) - self.left().velocity(t)) / self.grid.length()
    }
}
