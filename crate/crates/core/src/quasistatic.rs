//! Quasi-static evolution and stationary two-point problem in 1D.
//!
//! With both ends clamped and no body force, divergence-free stresses are
//! constant in space, so the quasi-static Norton-Hoff system collapses to the
//! scalar ODE `a theta' = m(t) - D gamma(theta)` with
//! `m = (w'(t, L) - w'(t, 0)) / L`. It is integrated with classical RK4, the
//! energy ledger integrals riding along as extra components.
//!
//! The stationary system `u = sigma'`, `u' = a sigma + D gamma(sigma)` with
//! `u(0) = w0`, `u(L) = wL` becomes `sigma'' = a sigma + D gamma(sigma)` with
//! Neumann data, solved by damped Newton on central differences.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dynamic::left_limit_at_end;
use crate::potential::{PotentialError, RadialProfile, ScalarPotential};
use crate::scenario::{Grid1D, Profile, Scenario, ScenarioError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QuasistaticError {
    #[error("scalar reduction unavailable: {0}")]
    ReductionUnavailable(String),
    #[error("invalid option: {0}")]
    InvalidOption(String),
    #[error("Newton iteration diverged: {0}")]
    NewtonDivergence(String),
    #[error("integration became unstable at t = {t} with dt = {dt}; reduce the step")]
    Unstable { t: f64, dt: f64 },
    #[error("maximum principle violated: interior maximum {interior:e} above boundary maximum {boundary:e}")]
    MaximumPrinciple { interior: f64, boundary: f64 },
    #[error(transparent)]
    Potential(#[from] PotentialError),
    #[error(transparent)]
    Scenario(#[from] ScenarioError),
}

/// Scalar ODE data extracted from a scenario.
#[derive(Clone, Debug)]
pub struct QsReduction<'a> {
    scenario: &'a Scenario,
    theta0: f64,
}

impl<'a> QsReduction<'a> {
    pub fn new(scenario: &'a Scenario) -> Result<Self, QuasistaticError> {
        let cfg = scenario.config();
        if !scenario.left().is_dirichlet() || !scenario.right().is_dirichlet() {
            return Err(QuasistaticError::ReductionUnavailable("both ends must carry displacement data".into()));
        }
        if cfg.loads.body_force.as_ref().is_some_and(|f| !f.is_zero()) {
            return Err(QuasistaticError::ReductionUnavailable("body force must vanish".into()));
        }
        if scenario.has_rho() {
            return Err(QuasistaticError::ReductionUnavailable("load potential must vanish".into()));
        }
        let theta0 = match cfg.initial.sigma {
            Profile::Zero => 0.0,
            Profile::Constant { value } => value,
            ref other => {
                return Err(QuasistaticError::ReductionUnavailable(format!(
                    "initial stress must be constant in space, got {other:?}"
                )))
            }
        };
        Ok(QsReduction { scenario, theta0 })
    }

    pub fn theta0(&self) -> f64 {
        self.theta0
    }

    /// `m(t) = (w'(t, L) - w'(t, 0)) / L`.
    pub fn forcing(&self, t: f64) -> f64 {
        self.scenario.lift_rate_slope(t)
    }

    /// Right-hand side of `[theta, plastic, dissipation, work]`.
    fn rhs(&self, t: f64, y: &[f64; 4]) -> Result<[f64; 4], PotentialError> {
        let a = self.scenario.compliance();
        let l = self.scenario.grid().length();
        let m = self.forcing(t);
        let dg = self.scenario.scalar_potential().dgamma(y[0])?;
        Ok([(m - dg) / a, dg, l * y[0] * dg, l * m * y[0]])
    }
}

/// Time series of the reduced quasi-static evolution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct QsTrajectory {
    pub t: Vec<f64>,
    /// Spatially constant stress.
    pub theta: Vec<f64>,
    /// Spatially constant plastic strain.
    pub plastic: Vec<f64>,
    pub dissipation: Vec<f64>,
    pub work: Vec<f64>,
    /// `a L theta^2 / 2 + dissipation - (a L theta0^2 / 2 + work)`.
    pub energy_residual: Vec<f64>,
    /// Largest `|z(L)|` of the auxiliary displacement `z_x = a theta' + D gamma(theta) - w'_x`.
    pub max_reconstruction_residual: f64,
}

impl QsTrajectory {
    pub fn final_theta(&self) -> f64 {
        *self.theta.last().unwrap_or(&f64::NAN)
    }

    /// `(sigma, v, u, p)` on the grid at record `index`.
    pub fn fields(&self, scenario: &Scenario, index: usize) -> (Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>) {
        let t = self.t[index];
        let x = scenario.grid().x();
        let n = x.len();
        (
            vec![self.theta[index]; n],
            x.iter().map(|&x| scenario.lift_rate(t, x)).collect(),
            // v = w'-lift since z vanishes, so u = u0 + lift(t) - lift(0).
            x.iter()
                .map(|&x| scenario.config().initial.displacement.value(x) + scenario.lift(t, x) - scenario.lift(0.0, x))
                .collect(),
            vec![self.plastic[index]; n],
        )
    }
}

/// Integrates the reduced ODE with RK4 up to `t_end` (last step shortened).
pub fn qs_evolve(scenario: &Scenario, dt: f64, t_end: f64) -> Result<QsTrajectory, QuasistaticError> {
    if !(dt > 0.0) || !(t_end > 0.0) {
        return Err(QuasistaticError::InvalidOption(format!("need dt > 0 and t_end > 0, got {dt}, {t_end}")));
    }
    let red = QsReduction::new(scenario)?;
    let a = scenario.compliance();
    let l = scenario.grid().length();
    let mut y = [red.theta0, 0.0, 0.0, 0.0];
    let stored0 = 0.5 * a * l * red.theta0 * red.theta0;
    let mut out = QsTrajectory::default();
    let mut t = 0.0;
    let record = |out: &mut QsTrajectory, t: f64, y: &[f64; 4]| {
        out.t.push(t);
        out.theta.push(y[0]);
        out.plastic.push(y[1]);
        out.dissipation.push(y[2]);
        out.work.push(y[3]);
        out.energy_residual.push(0.5 * a * l * y[0] * y[0] + y[2] - (stored0 + y[3]));
    };
    record(&mut out, t, &y);
    let add = |y: &[f64; 4], k: &[f64; 4], h: f64| -> [f64; 4] { std::array::from_fn(|i| y[i] + h * k[i]) };
    while t < t_end * (1.0 - 1e-14) {
        let h = dt.min(t_end - t);
        let k1 = red.rhs(t, &y)?;
        let k2 = red.rhs(t + 0.5 * h, &add(&y, &k1, 0.5 * h))?;
        let k3 = red.rhs(t + 0.5 * h, &add(&y, &k2, 0.5 * h))?;
        let k4 = red.rhs(t + h, &add(&y, &k3, h))?;
        y = std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]));
        if y.iter().any(|v| !v.is_finite()) {
            return Err(QuasistaticError::Unstable { t: t + h, dt: h });
        }
        t = if (t_end - (t + h)).abs() <= 1e-12 * t_end { t_end } else { t + h };
        record(&mut out, t, &y);
        // z_x is constant in x, so z(L) = L z_x.
        let rate = red.rhs(t, &y)?;
        let zx = a * rate[0] + rate[1] - red.forcing(t);
        out.max_reconstruction_residual = out.max_reconstruction_residual.max((l * zx).abs());
    }
    Ok(out)
}

/// Saturation distance `d` with `g(d) d = m / a` (zero forcing gives zero).
pub fn saturation_distance(profile: &RadialProfile, forcing_over_compliance: f64) -> Result<f64, PotentialError> {
    profile.inverse_slope(forcing_over_compliance.abs())
}

#[derive(Clone, Debug, PartialEq)]
pub struct StationaryProblem {
    pub grid: Grid1D,
    pub compliance: f64,
    /// `u(0)`.
    pub left_displacement: f64,
    /// `u(L)`.
    pub right_displacement: f64,
    pub potential: ScalarPotential,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NewtonOptions {
    /// Tolerance on the `dx^2`-scaled residual.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Below this `alpha`, solve by continuation from `alpha = 1`.
    pub continuation_below: f64,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        NewtonOptions { tolerance: 1e-10, max_iterations: 200, continuation_below: 0.1 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationarySolution {
    pub x: Vec<f64>,
    pub sigma: Vec<f64>,
    /// `u = sigma'`.
    pub u: Vec<f64>,
    /// Plastic strain density `D gamma(sigma)`.
    pub plastic: Vec<f64>,
    /// Final `dx^2`-scaled residual (max norm).
    pub residual: f64,
    pub iterations: usize,
    /// `alpha` values visited (last is the target).
    pub continuation: Vec<f64>,
    pub dx: f64,
}

impl StationarySolution {
    /// Trapezoid mass of the plastic density on `[from, L]`.
    pub fn plastic_mass(&self, from: f64) -> f64 {
        let first = self.x.iter().position(|&x| x >= from - 1e-9 * self.dx).unwrap_or(self.x.len() - 1);
        let p = &self.plastic[first..];
        if p.len() < 2 {
            return 0.0;
        }
        self.dx * (p.iter().sum::<f64>() - 0.5 * (p[0] + p[p.len() - 1]))
    }

    /// `u(L-) - u(L)` using the trace extrapolated from the interior.
    pub fn boundary_gap(&self, grid: &Grid1D, right_displacement: f64, delta: f64) -> f64 {
        left_limit_at_end(grid, &self.u, delta) - right_displacement
    }
}

impl StationaryProblem {
    pub fn new(
        length: f64,
        nodes: usize,
        compliance: f64,
        left_displacement: f64,
        right_displacement: f64,
        potential: ScalarPotential,
    ) -> Result<Self, QuasistaticError> {
        if !(compliance > 0.0) {
            return Err(QuasistaticError::InvalidOption(format!("compliance must be positive, got {compliance}")));
        }
        Ok(StationaryProblem {
            grid: Grid1D::new(length, nodes)?,
            compliance,
            left_displacement,
            right_displacement,
            potential,
        })
    }

    /// Stationary data of a scenario: its grid, compliance, potential and the
    /// boundary displacements at `t = 0`.
    pub fn from_scenario(scenario: &Scenario) -> Result<Self, QuasistaticError> {
        if !scenario.left().is_dirichlet() || !scenario.right().is_dirichlet() {
            return Err(QuasistaticError::ReductionUnavailable("stationary problem needs displacement data at both ends".into()));
        }
        Ok(StationaryProblem {
            grid: scenario.grid().clone(),
            compliance: scenario.compliance(),
            left_displacement: scenario.left().displacement(0.0),
            right_displacement: scenario.right().displacement(0.0),
            potential: *scenario.scalar_potential(),
        })
    }

    fn residual(&self, pot: &ScalarPotential, sigma: &[f64], out: &mut [f64]) -> Result<f64, PotentialError> {
        let n = sigma.len();
        let h = self.grid.dx();
        let h2 = h * h;
        let a = self.compliance;
        let mut worst = 0.0_f64;
        for k in 0..n {
            let lap = if k == 0 {
                2.0 * sigma[1] - 2.0 * sigma[0] - 2.0 * h * self.left_displacement
            } else if k == n - 1 {
                2.0 * sigma[n - 2] - 2.0 * sigma[n - 1] + 2.0 * h * self.right_displacement
            } else {
                sigma[k + 1] - 2.0 * sigma[k] + sigma[k - 1]
            };
            out[k] = lap - h2 * (a * sigma[k] + pot.dgamma(sigma[k])?);
            worst = worst.max(out[k].abs());
        }
        Ok(worst)
    }

    fn newton(&self, pot: &ScalarPotential, sigma: &mut Vec<f64>, opts: &NewtonOptions) -> Result<(f64, usize), QuasistaticError> {
        let n = sigma.len();
        let h2 = self.grid.dx() * self.grid.dx();
        let a = self.compliance;
        let mut r = vec![0.0; n];
        let mut norm = self.residual(pot, sigma, &mut r)?;
        let (mut lower, mut diag, mut upper) = (vec![0.0; n], vec![0.0; n], vec![0.0; n]);
        let mut trial = vec![0.0; n];
        let mut trial_r = vec![0.0; n];
        for it in 0..opts.max_iterations {
            if norm <= opts.tolerance {
                return Ok((norm, it));
            }
            for k in 0..n {
                let s = sigma[k];
                let eps = 1e-7 * s.abs().max(1.0);
                let slope = (pot.dgamma(s + eps)? - pot.dgamma(s)?) / eps;
                diag[k] = -2.0 - h2 * (a + slope);
                lower[k] = if k == n - 1 { 2.0 } else { 1.0 };
                upper[k] = if k == 0 { 2.0 } else { 1.0 };
            }
            let step = solve_tridiagonal(&lower, &diag, &upper, &r);
            let mut scale = 1.0;
            let mut accepted = false;
            for _ in 0..40 {
                for k in 0..n {
                    trial[k] = sigma[k] - scale * step[k];
                }
                match self.residual(pot, &trial, &mut trial_r) {
                    Ok(tn) if tn < norm => {
                        sigma.copy_from_slice(&trial);
                        r.copy_from_slice(&trial_r);
                        norm = tn;
                        accepted = true;
                        break;
                    }
                    Ok(_) | Err(PotentialError::Overflow { .. }) => scale *= 0.5,
                    Err(e) => return Err(e.into()),
                }
            }
            if !accepted {
                if norm <= 100.0 * opts.tolerance {
                    return Ok((norm, it));
                }
                return Err(QuasistaticError::NewtonDivergence(format!(
                    "no decrease after 40 halvings at alpha = {} (residual {norm:e})",
                    pot.profile().alpha()
                )));
            }
        }
        if norm <= opts.tolerance {
            return Ok((norm, opts.max_iterations));
        }
        Err(QuasistaticError::NewtonDivergence(format!(
            "residual {norm:e} after {} iterations at alpha = {}",
            opts.max_iterations,
            pot.profile().alpha()
        )))
    }

    fn with_alpha(&self, alpha: f64) -> Result<ScalarPotential, QuasistaticError> {
        let (lo, hi) = self.potential.bounds();
        let profile = RadialProfile::new(alpha, self.potential.profile().lambda())?;
        Ok(ScalarPotential::new(lo, hi, profile))
    }

    /// Damped Newton, with continuation in `alpha` from 1 when the target is small.
    pub fn solve(&self, opts: &NewtonOptions) -> Result<StationarySolution, QuasistaticError> {
        let n = self.grid.nodes();
        let target = self.potential.profile().alpha();
        let mut sigma = vec![0.0; n];
        let mut path = Vec::new();
        let mut iterations = 0;
        let residual;
        if target >= opts.continuation_below {
            let (r, it) = self.newton(&self.potential, &mut sigma, opts)?;
            path.push(target);
            iterations += it;
            residual = r;
        } else {
            let mut alpha = 1.0_f64;
            let (_, it) = self.newton(&self.with_alpha(alpha)?, &mut sigma, opts)?;
            path.push(alpha);
            iterations += it;
            let mut ratio = 0.5_f64;
            loop {
                let next = (alpha * ratio).max(target);
                let mut trial = sigma.clone();
                match self.newton(&self.with_alpha(next)?, &mut trial, opts) {
                    Ok((r, it)) => {
                        sigma = trial;
                        alpha = next;
                        path.push(alpha);
                        iterations += it;
                        if alpha == target {
                            residual = r;
                            break;
                        }
                    }
                    Err(QuasistaticError::NewtonDivergence(msg)) => {
                        ratio = ratio.sqrt();
                        if ratio > 0.999 {
                            return Err(QuasistaticError::NewtonDivergence(format!("continuation stalled at alpha = {alpha}: {msg}")));
                        }
                    }
                    Err(e) => return Err(e),
                }
            }
        }
        self.check_maximum_principle(&sigma)?;
        let mut u = vec![0.0; n];
        self.grid.derivative(&sigma, &mut u);
        let plastic = sigma.iter().map(|&s| self.potential.dgamma(s)).collect::<Result<Vec<_>, _>>()?;
        Ok(StationarySolution {
            x: self.grid.x().to_vec(),
            sigma,
            u,
            plastic,
            residual,
            iterations,
            continuation: path,
            dx: self.grid.dx(),
        })
    }

    /// With `u(0) = 0 <= u(L)` the stress is convex and increasing, so its
    /// maximum sits at `x = L`.
    fn check_maximum_principle(&self, sigma: &[f64]) -> Result<(), QuasistaticError> {
        if self.left_displacement != 0.0 || self.right_displacement <= 0.0 {
            return Ok(());
        }
        let n = sigma.len();
        let boundary = sigma[0].max(sigma[n - 1]);
        let interior = sigma[1..n - 1].iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let scale = 1.0 + sigma.iter().fold(0.0_f64, |m, s| m.max(s.abs()));
        if interior > boundary + 1e-12 * scale {
            return Err(QuasistaticError::MaximumPrinciple { interior, boundary });
        }
        Ok(())
    }
}

/// Solves the stationary problem described by a scenario.
pub fn solve_stationary(scenario: &Scenario) -> Result<StationarySolution, QuasistaticError> {
    StationaryProblem::from_scenario(scenario)?.solve(&NewtonOptions::default())
}

/// Thomas algorithm; `lower[0]` and `upper[n - 1]` are ignored.
fn solve_tridiagonal(lower: &[f64], diag: &[f64], upper: &[f64], rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    let mut c = vec![0.0; n];
    let mut d = vec![0.0; n];
    c[0] = upper[0] / diag[0];
    d[0] = rhs[0] / diag[0];
    for k in 1..n {
        let m = diag[k] - lower[k] * c[k - 1];
        c[k] = if k < n - 1 { upper[k] / m } else { 0.0 };
        d[k] = (rhs[k] - lower[k] * d[k - 1]) / m;
    }
    let mut x = vec![0.0; n];
    x[n - 1] = d[n - 1];
    for k in (0..n - 1).rev() {
        x[k] = d[k] - c[k] * x[k + 1];
    }
    x
}
