//! The regularized Norton-Hoff potential
//!
//! ```text
//! gamma(xi) = alpha/(alpha+1) (1 + d^2 ^ lambda^2)^((alpha+1)/(2 alpha))
//!           + 1/2 (1 + lambda^2)^(1/(2 alpha) - 1/2) (d^2 - lambda^2)_+
//! ```
//!
//! with `d = d(xi)` the distance to the admissible set. It is a convex,
//! increasing function of `d`: `gamma = phi(d)` for the radial profile `phi`,
//! whose derivative is `phi'(r) = g(r) r` with
//! `g(r) = (1 + r^2 ^ lambda^2)^(1/(2 alpha) - 1/2)`.
//!
//! Powers with exponent `1/(2 alpha) - 1/2` are evaluated in log space; a value
//! whose logarithm exceeds 700 is reported as [`PotentialError::Overflow`]
//! rather than returned as an infinity.
//!
//! The convex conjugate splits along the radial structure: since
//! `phi(d_K(.))` is the infimal convolution of the indicator of `K` with
//! `phi(|.|)`, its conjugate is `H(eta) + phi*(|eta|)` with `H` the support
//! function of `K` and `phi*(s) = sup_{r >= 0} (r s - phi(r))`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geometry::{GeometryError, SymMatrix, YieldSurface};

/// Largest admissible natural logarithm of any evaluated power.
pub const LOG_OVERFLOW: f64 = 700.0;
/// Iteration cap for the scalar root finds (bisection and Newton).
pub const MAX_ROOT_ITERATIONS: usize = 200;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PotentialError {
    #[error("invalid potential parameters: {0}")]
    InvalidParameters(String),
    #[error("{what} overflows: log value {log_value:.1} exceeds {LOG_OVERFLOW}")]
    Overflow { what: &'static str, log_value: f64 },
    #[error("conjugate bracket exceeded 2^60 for |eta| = {slope:e}")]
    BracketFailure { slope: f64 },
    #[error("root find failed: {0}")]
    RootFindFailure(String),
    #[error("not applicable: {0}")]
    NotApplicable(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

fn checked_exp(log_value: f64, what: &'static str) -> Result<f64, PotentialError> {
    if log_value > LOG_OVERFLOW || log_value.is_nan() {
        return Err(PotentialError::Overflow { what, log_value });
    }
    Ok(log_value.exp())
}

/// Radial profile `phi` of the potential and its derivatives.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    alpha: f64,
    lambda: f64,
}

impl RadialProfile {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self, PotentialError> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(PotentialError::InvalidParameters(format!("alpha must lie in (0, 1], got {alpha}")));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(PotentialError::InvalidParameters(format!("lambda must be positive and finite, got {lambda}")));
        }
        Ok(RadialProfile { alpha, lambda })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// `1/(2 alpha) - 1/2`.
    pub fn exponent(&self) -> f64 {
        0.5 / self.alpha - 0.5
    }

    fn log_base(&self, r: f64) -> f64 {
        (r * r).min(self.lambda * self.lambda).ln_1p()
    }

    /// `g(r) = (1 + r^2 ^ lambda^2)^(1/(2 alpha) - 1/2)`.
    pub fn g(&self, r: f64) -> Result<f64, PotentialError> {
        checked_exp(self.exponent() * self.log_base(r), "g(d)")
    }

    /// Slope of the linear-growth branch, `g(lambda)`.
    pub fn cap_slope(&self) -> Result<f64, PotentialError> {
        self.g(self.lambda)
    }

    pub fn phi(&self, r: f64) -> Result<f64, PotentialError> {
        let a = self.alpha;
        let main = a / (a + 1.0) * checked_exp((self.exponent() + 1.0) * self.log_base(r), "gamma")?;
        let excess = (r * r - self.lambda * self.lambda).max(0.0);
        let linear = if excess > 0.0 { 0.5 * self.cap_slope()? * excess } else { 0.0 };
        Ok(main + linear)
    }

    /// `phi'(r) = g(r) r`.
    pub fn dphi(&self, r: f64) -> Result<f64, PotentialError> {
        Ok(self.g(r)? * r)
    }

    /// `phi''(r)`; one-sided (from below) at the seam `r = lambda`.
    pub fn d2phi(&self, r: f64) -> Result<f64, PotentialError> {
        let g = self.g(r)?;
        if r > self.lambda {
            return Ok(g);
        }
        let r2 = r * r;
        Ok(g * (1.0 + 2.0 * self.exponent() * r2 / (1.0 + r2)))
    }

    /// `phi(0) = alpha / (alpha + 1)`.
    pub fn minimum(&self) -> f64 {
        self.alpha / (self.alpha + 1.0)
    }

    /// Solves `phi'(r) = s` for `s > 0` by bisection on a geometrically grown bracket.
    pub fn inverse_slope(&self, s: f64) -> Result<f64, PotentialError> {
        if s <= 0.0 {
            return Ok(0.0);
        }
        let mut hi = 1.0_f64;
        loop {
            match self.dphi(hi) {
                Ok(v) if v >= s => break,
                Ok(_) => {}
                // Overflow only happens for slopes far beyond s.
                Err(PotentialError::Overflow { .. }) => break,
                Err(e) => return Err(e),
            }
            hi *= 2.0;
            if hi > 2f64.powi(60) {
                return Err(PotentialError::BracketFailure { slope: s });
            }
        }
        let mut lo = 0.0_f64;
        for _ in 0..MAX_ROOT_ITERATIONS {
            let mid = 0.5 * (lo + hi);
            let above = match self.dphi(mid) {
                Ok(v) => v >= s,
                Err(PotentialError::Overflow { .. }) => true,
                Err(e) => return Err(e),
            };
            if above {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo <= 1e-15 * hi.max(f64::MIN_POSITIVE) {
                break;
            }
        }
        Ok(0.5 * (lo + hi))
    }

    /// `phi*(s) = sup_{r >= 0} (r s - phi(r))`.
    pub fn conjugate(&self, s: f64) -> Result<f64, PotentialError> {
        let r = self.inverse_slope(s)?;
        let v = r * s.max(0.0) - self.phi(r)?;
        if !v.is_finite() {
            return Err(PotentialError::RootFindFailure(format!("non-finite conjugate at slope {s:e}")));
        }
        Ok(v)
    }

    /// Root of `d + tau phi'(d) = d0` in `[0, d0]` (safeguarded Newton).
    pub fn relaxed_distance(&self, d0: f64, tau: f64) -> Result<f64, PotentialError> {
        if !(tau > 0.0) {
            return Err(PotentialError::InvalidParameters(format!("relaxation step must be positive, got {tau}")));
        }
        if d0 <= 0.0 {
            return Ok(0.0);
        }
        // F(d) = d + tau phi'(d) - d0; an overflowing phi' means F = +inf.
        let f = |d: f64| -> Result<Option<f64>, PotentialError> {
            match self.dphi(d) {
                Ok(v) => Ok(Some(d + tau * v - d0)),
                Err(PotentialError::Overflow { .. }) => Ok(None),
                Err(e) => Err(e),
            }
        };
        let (mut lo, mut hi) = (0.0_f64, d0);
        // g(d) d <= g(d0) d, so this guess never overshoots the root.
        let mut d = match self.g(d0) {
            Ok(g0) => d0 / (1.0 + tau * g0),
            Err(_) => 0.5 * d0,
        };
        let tol = 1e-14 * d0;
        for _ in 0..MAX_ROOT_ITERATIONS {
            let val = match f(d)? {
                Some(v) => v,
                None => {
                    hi = d;
                    d = 0.5 * (lo + hi);
                    continue;
                }
            };
            if val == 0.0 {
                return Ok(d);
            }
            if val < 0.0 {
                lo = d;
            } else {
                hi = d;
            }
            let slope = 1.0 + tau * self.d2phi(d).unwrap_or(f64::INFINITY);
            let mut next = d - val / slope;
            if !(next > lo && next < hi) || !next.is_finite() {
                next = 0.5 * (lo + hi);
            }
            if (next - d).abs() <= tol || hi - lo <= tol {
                return Ok(next.clamp(lo, hi));
            }
            d = next;
        }
        Err(PotentialError::RootFindFailure(format!(
            "relaxed distance for d0 = {d0:e}, tau = {tau:e} not resolved in {MAX_ROOT_ITERATIONS} iterations"
        )))
    }
}

/// `gamma_{alpha, lambda}` over a yield surface.
#[derive(Clone, Debug, PartialEq)]
pub struct RegularizedPotential {
    profile: RadialProfile,
    surface: YieldSurface,
}

impl RegularizedPotential {
    pub fn new(alpha: f64, lambda: f64, surface: YieldSurface) -> Result<Self, PotentialError> {
        Ok(RegularizedPotential { profile: RadialProfile::new(alpha, lambda)?, surface })
    }

    pub fn profile(&self) -> RadialProfile {
        self.profile
    }

    pub fn alpha(&self) -> f64 {
        self.profile.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.profile.lambda
    }

    pub fn surface(&self) -> &YieldSurface {
        &self.surface
    }

    pub fn distance(&self, xi: &SymMatrix) -> Result<f64, PotentialError> {
        Ok(self.surface.distance(xi)?)
    }

    pub fn gamma(&self, xi: &SymMatrix) -> Result<f64, PotentialError> {
        self.profile.phi(self.distance(xi)?)
    }

    /// `D gamma(xi) = g(d) (xi - Pi(xi))`.
    pub fn dgamma(&self, xi: &SymMatrix) -> Result<SymMatrix, PotentialError> {
        let proj = self.surface.project(xi)?;
        if proj.inside {
            return Ok(SymMatrix::zeros(xi.dim()));
        }
        Ok((*xi - proj.point) * self.profile.g(proj.distance)?)
    }

    /// Convex conjugate `gamma*(eta) = H(eta) + phi*(|eta|)`; `eta` must be
    /// trace-free for matrix surfaces (elsewhere the conjugate is infinite).
    pub fn fenchel_conjugate(&self, eta: &SymMatrix) -> Result<f64, PotentialError> {
        let h = self.surface.support(eta)?;
        let v = h + self.profile.conjugate(eta.norm())?;
        if !v.is_finite() {
            return Err(PotentialError::RootFindFailure(format!("conjugate is not finite at {eta:?}")));
        }
        Ok(v)
    }

    /// Implicit relaxation `sigma + tau D gamma(sigma) = sigma_star`, solved along
    /// the projection ray of `sigma_star`.
    pub fn relax_implicit(&self, sigma_star: &SymMatrix, tau: f64) -> Result<SymMatrix, PotentialError> {
        let proj = self.surface.project(sigma_star)?;
        if proj.inside {
            if !(tau > 0.0) {
                return Err(PotentialError::InvalidParameters(format!("relaxation step must be positive, got {tau}")));
            }
            return Ok(*sigma_star);
        }
        let d = self.profile.relaxed_distance(proj.distance, tau)?;
        Ok(proj.point + (*sigma_star - proj.point) * (d / proj.distance))
    }

    /// Scalar view for interval surfaces.
    pub fn scalar(&self) -> Result<ScalarPotential, PotentialError> {
        let (lower, upper) = self
            .surface
            .interval_bounds()
            .ok_or_else(|| PotentialError::NotApplicable("scalar potential needs an interval surface".into()))?;
        Ok(ScalarPotential { lower, upper, profile: self.profile })
    }

    /// Checks `D gamma . xi >= g d^2` and `D gamma . xi >= r_K |D gamma|` at the
    /// given points.
    pub fn verify_gradient_inequalities(&self, points: &[SymMatrix]) -> Result<GradientInequalityReport, PotentialError> {
        let r_k = self.surface.inner_radius();
        let mut report = GradientInequalityReport {
            samples: points.len(),
            min_slack_distance: f64::INFINITY,
            min_slack_radius: f64::INFINITY,
            passed: true,
        };
        for xi in points {
            let d = self.distance(xi)?;
            let dg = self.dgamma(xi)?;
            let g = self.profile.g(d)?;
            let work = dg.dot(xi);
            let norm = 1.0 + work.abs();
            let s1 = (work - g * d * d) / norm;
            let s2 = (work - r_k * dg.norm()) / norm;
            report.min_slack_distance = report.min_slack_distance.min(s1);
            report.min_slack_radius = report.min_slack_radius.min(s2);
        }
        report.passed = report.min_slack_distance >= -1e-10 && report.min_slack_radius >= -1e-10;
        Ok(report)
    }

    /// [`Self::verify_gradient_inequalities`] at `samples` random points with
    /// entries up to `3 R_K`.
    pub fn verify_gradient_inequalities_random<R: Rng>(
        &self,
        samples: usize,
        rng: &mut R,
    ) -> Result<GradientInequalityReport, PotentialError> {
        let scale = 3.0 * self.surface.outer_radius();
        let points: Vec<SymMatrix> = (0..samples).map(|_| self.surface.random_point(rng, scale)).collect();
        self.verify_gradient_inequalities(&points)
    }

    /// Discrete check of the chain-rule curvature bound
    /// `d_k(D gamma(sigma)) . d_k sigma >= g(d) C_K d / (1 + C_K d) |d_k sigma_D|^2`
    /// with central differences at interior nodes. Needs an estimated `C_K`.
    pub fn chain_rule_curvature_check(&self, field: &[SymMatrix], dx: f64) -> Result<ChainRuleReport, PotentialError> {
        if self.surface.is_interval() {
            return Err(PotentialError::NotApplicable(
                "interval surfaces use chain_rule_scalar_check (no deviatoric curvature)".into(),
            ));
        }
        let c_k = self.surface.curvature().value().ok_or_else(|| {
            PotentialError::NotApplicable("curvature bound must be estimated before the chain-rule check".into())
        })?;
        let dgam: Vec<SymMatrix> = field.iter().map(|s| self.dgamma(s)).collect::<Result<_, _>>()?;
        let mut report = ChainRuleReport::empty();
        for k in 1..field.len().saturating_sub(1) {
            let dsig = (field[k + 1] - field[k - 1]) * (0.5 / dx);
            let lhs = (dgam[k + 1] - dgam[k - 1]).dot(&dsig) * (0.5 / dx);
            let d = self.distance(&field[k])?;
            let g = self.profile.g(d)?;
            let rhs = g * c_k * d / (1.0 + c_k * d) * dsig.deviatoric().dot(&dsig.deviatoric());
            report.record(lhs, rhs);
        }
        Ok(report)
    }
}

/// Scalar potential over an interval `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ScalarPotential {
    lower: f64,
    upper: f64,
    profile: RadialProfile,
}

impl ScalarPotential {
    pub fn new(lower: f64, upper: f64, profile: RadialProfile) -> Self {
        ScalarPotential { lower, upper, profile }
    }

    pub fn profile(&self) -> RadialProfile {
        self.profile
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.lower, self.upper)
    }

    pub fn inner_radius(&self) -> f64 {
        (-self.lower).min(self.upper)
    }

    #[inline]
    pub fn project(&self, sigma: f64) -> f64 {
        sigma.clamp(self.lower, self.upper)
    }

    #[inline]
    pub fn distance(&self, sigma: f64) -> f64 {
        (sigma - self.project(sigma)).abs()
    }

    pub fn support(&self, q: f64) -> f64 {
        (self.lower * q).max(self.upper * q)
    }

    pub fn gamma(&self, sigma: f64) -> Result<f64, PotentialError> {
        self.profile.phi(self.distance(sigma))
    }

    pub fn dgamma(&self, sigma: f64) -> Result<f64, PotentialError> {
        let p = self.project(sigma);
        if p == sigma {
            return Ok(0.0);
        }
        Ok(self.profile.g((sigma - p).abs())? * (sigma - p))
    }

    pub fn fenchel_conjugate(&self, eta: f64) -> Result<f64, PotentialError> {
        Ok(self.support(eta) + self.profile.conjugate(eta.abs())?)
    }

    /// Solves `sigma + tau D gamma(sigma) = sigma_star`.
    pub fn relax(&self, sigma_star: f64, tau: f64) -> Result<f64, PotentialError> {
        let p = self.project(sigma_star);
        let d0 = (sigma_star - p).abs();
        if d0 == 0.0 {
            return Ok(sigma_star);
        }
        let d = self.profile.relaxed_distance(d0, tau)?;
        Ok(p + (sigma_star - p).signum() * d)
    }

    /// Normalized flow-rule defect `|H(dp) - sigma dp| / |dp|` of a plastic
    /// increment `dp` taken at stress `sigma`; zero when `|dp| <= 1e-14`.
    pub fn flow_rule_defect(&self, sigma: f64, dp: f64) -> f64 {
        if dp.abs() <= 1e-14 {
            return 0.0;
        }
        (self.support(dp) - sigma * dp).abs() / dp.abs()
    }

    /// Scalar analogue of the chain-rule check: where a whole stencil lies
    /// outside the interval on one side, the discrete product
    /// `d(D gamma(sigma)) d(sigma)` must dominate `g(d_min) |d sigma|^2`.
    pub fn chain_rule_scalar_check(&self, field: &[f64], dx: f64) -> Result<ChainRuleReport, PotentialError> {
        let mut report = ChainRuleReport::empty();
        for k in 1..field.len().saturating_sub(1) {
            let (a, b, c) = (field[k - 1], field[k], field[k + 1]);
            let dsig = (c - a) * 0.5 / dx;
            let lhs = (self.dgamma(c)? - self.dgamma(a)?) * 0.5 / dx * dsig;
            let above = a > self.upper && b > self.upper && c > self.upper;
            let below = a < self.lower && b < self.lower && c < self.lower;
            let rhs = if above || below {
                let dmin = self.distance(a).min(self.distance(b)).min(self.distance(c));
                self.profile.g(dmin)? * dsig * dsig
            } else {
                0.0
            };
            report.record(lhs, rhs);
        }
        Ok(report)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GradientInequalityReport {
    pub samples: usize,
    /// Smallest relative slack of `D gamma . xi - g d^2`.
    pub min_slack_distance: f64,
    /// Smallest relative slack of `D gamma . xi - r_K |D gamma|`.
    pub min_slack_radius: f64,
    pub passed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChainRuleReport {
    pub nodes_checked: usize,
    /// `min (lhs - rhs)` over interior nodes.
    pub min_slack: f64,
    /// Largest `|rhs|`, the natural scale of the slack.
    pub max_rhs: f64,
    pub max_lhs: f64,
}

impl ChainRuleReport {
    fn empty() -> Self {
        ChainRuleReport { nodes_checked: 0, min_slack: f64::INFINITY, max_rhs: 0.0, max_lhs: 0.0 }
    }

    fn record(&mut self, lhs: f64, rhs: f64) {
        self.nodes_checked += 1;
        self.min_slack = self.min_slack.min(lhs - rhs);
        self.max_rhs = self.max_rhs.max(rhs.abs());
        self.max_lhs = self.max_lhs.max(lhs.abs());
    }
}
