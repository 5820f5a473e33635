//! Closed-form solutions of the 1D limit problem with `a = 1`, `K = [-1, 1]`,
//! `w(0) = 0`.
//!
//! Stationary: `u(L) = b`. For `|b| <= tanh L` the solution is elastic,
//! `u = b sinh x / sinh L`. Otherwise `sigma = +-cosh x / cosh L` saturates at
//! `x = L` and the remaining displacement becomes a plastic atom
//! `b -+ tanh L` at the boundary.
//!
//! Evolutionary: `u(t, L) = a e^t` with `0 < a < tanh L`. The body is elastic
//! until `t0 = ln(tanh L / a)`; afterwards a plastic zone
//! `x > gamma(t) = arccosh(sinh L / (a e^t))` grows from the right end with
//! `sigma = 1` and the boundary condition at `x = L` is lost.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ExactError {
    #[error("invalid exact-solution parameters: {0}")]
    InvalidParameters(String),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StationaryRegime {
    Elastic,
    PlasticBoundary,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryExact {
    pub length: f64,
    pub boundary_value: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct StationaryPoint {
    pub u: f64,
    pub sigma: f64,
    /// Plastic mass concentrated at `x = L`.
    pub atom: f64,
}

impl StationaryExact {
    pub fn new(length: f64, boundary_value: f64) -> Result<Self, ExactError> {
        if !(length > 0.0) || !length.is_finite() || !boundary_value.is_finite() {
            return Err(ExactError::InvalidParameters(format!("length {length}, boundary value {boundary_value}")));
        }
        Ok(StationaryExact { length, boundary_value })
    }

    pub fn regime(&self) -> StationaryRegime {
        if self.boundary_value.abs() <= self.length.tanh() {
            StationaryRegime::Elastic
        } else {
            StationaryRegime::PlasticBoundary
        }
    }

    /// Amplitude `c` of `u = c sinh x`, `sigma = c cosh x`.
    fn amplitude(&self) -> f64 {
        match self.regime() {
            StationaryRegime::Elastic => self.boundary_value / self.length.sinh(),
            StationaryRegime::PlasticBoundary => self.boundary_value.signum() / self.length.cosh(),
        }
    }

    pub fn atom(&self) -> f64 {
        match self.regime() {
            StationaryRegime::Elastic => 0.0,
            StationaryRegime::PlasticBoundary => self.boundary_value - self.amplitude() * self.length.sinh(),
        }
    }

    pub fn eval(&self, x: f64) -> StationaryPoint {
        let c = self.amplitude();
        StationaryPoint { u: c * x.sinh(), sigma: c * x.cosh(), atom: self.atom() }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Region {
    /// `t <= t0`: the whole bar is elastic.
    PreOnset,
    /// Elastic zone left of the interface.
    Elastic,
    /// The interface itself (reported with the plastic formulas, zero rate).
    Interface,
    Plastic,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionaryExact {
    pub length: f64,
    pub amplitude: f64,
    pub horizon: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvolutionaryPoint {
    pub u: f64,
    /// Velocity `u_t`.
    pub v: f64,
    pub sigma: f64,
    /// Plastic strain density (absolutely continuous part).
    pub p: f64,
    pub p_rate: f64,
    pub region: Region,
}

impl EvolutionaryExact {
    pub fn new(length: f64, amplitude: f64, horizon: f64) -> Result<Self, ExactError> {
        let th = length.tanh();
        if !(length > 0.0 && amplitude > 0.0 && amplitude < th) {
            return Err(ExactError::InvalidParameters(format!("need 0 < a < tanh L, got a = {amplitude}, L = {length}")));
        }
        if !(amplitude * horizon.exp() > th) {
            return Err(ExactError::InvalidParameters(format!("horizon {horizon} ends before plastic onset")));
        }
        Ok(EvolutionaryExact { length, amplitude, horizon })
    }

    /// `t0 = ln(tanh L / a)`.
    pub fn onset_time(&self) -> f64 {
        (self.length.tanh() / self.amplitude).ln()
    }

    /// Interface position `gamma(t)`; `None` before onset.
    pub fn interface(&self, t: f64) -> Option<f64> {
        if t <= self.onset_time() {
            return None;
        }
        let c = self.length.sinh() / (self.amplitude * t.exp());
        Some(c.max(1.0).acosh().min(self.length))
    }

    /// Time at which the interface passes `x`, `ln(sinh L / (a cosh x))`.
    pub fn passage_time(&self, x: f64) -> f64 {
        (self.length.sinh() / (self.amplitude * x.cosh())).ln()
    }

    pub fn region(&self, t: f64, x: f64) -> Region {
        match self.interface(t) {
            None => Region::PreOnset,
            Some(g) if x < g => Region::Elastic,
            Some(g) if x == g => Region::Interface,
            Some(_) => Region::Plastic,
        }
    }

    pub fn eval(&self, t: f64, x: f64) -> EvolutionaryPoint {
        let region = self.region(t, x);
        match region {
            Region::PreOnset | Region::Elastic => {
                let c = self.amplitude * t.exp() / self.length.sinh();
                EvolutionaryPoint { u: c * x.sinh(), v: c * x.sinh(), sigma: c * x.cosh(), p: 0.0, p_rate: 0.0, region }
            }
            Region::Interface | Region::Plastic => {
                let tx = x.tanh();
                let sech2 = 1.0 - tx * tx;
                let tau = self.passage_time(x);
                let p_rate = if region == Region::Plastic { sech2 } else { 0.0 };
                EvolutionaryPoint {
                    u: tx * (t + 1.0 - tau),
                    v: tx,
                    sigma: 1.0,
                    p: sech2 * (t - tau).max(0.0),
                    p_rate,
                    region,
                }
            }
        }
    }

    /// Prescribed `w(t, L) = a e^t`.
    pub fn boundary_displacement(&self, t: f64) -> f64 {
        self.amplitude * t.exp()
    }

    /// `w(t, L) - u(t, L)`: zero before onset, then
    /// `a e^t - tanh L [t + 1 - ln(tanh L / a)]`.
    pub fn boundary_jump(&self, t: f64) -> f64 {
        if t <= self.onset_time() {
            return 0.0;
        }
        self.boundary_displacement(t) - self.length.tanh() * (t + 1.0 - self.onset_time())
    }
}

/// Outcome of a sampled residual audit of a closed-form solution.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ExactAudit {
    pub samples: usize,
    /// Equation of motion (`u_tt - sigma_x`, or `u - sigma_x` when stationary).
    pub max_motion_residual: f64,
    /// Kinematic relation `u_x - sigma - p` away from the interface.
    pub max_kinematic_residual: f64,
    /// `max (|sigma| - 1)_+`.
    pub max_stress_excess: f64,
    /// `max (|p_t| - sigma p_t)`.
    pub max_flow_rule_violation: f64,
    /// Largest jump of `u`, `u_t`, `sigma` across the interface or the onset time.
    pub max_interface_jump: f64,
    /// `min sigma(L) (w(L) - u(L))` (must be nonnegative).
    pub min_boundary_work: f64,
    pub violations: Vec<String>,
}

impl ExactAudit {
    fn finish(mut self, tolerance: f64) -> Self {
        let checks = [
            ("equation of motion", self.max_motion_residual),
            ("kinematic relation", self.max_kinematic_residual),
            ("stress constraint", self.max_stress_excess),
            ("flow rule", self.max_flow_rule_violation),
            ("interface continuity", self.max_interface_jump),
            ("boundary flow rule", (-self.min_boundary_work).max(0.0)),
        ];
        for (name, value) in checks {
            if value > tolerance {
                self.violations.push(format!("{name}: {value:e} > {tolerance:e}"));
            }
        }
        self
    }

    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }
}

const AUDIT_POINTS: usize = 200;

/// Audits a stationary solution with central differences of step `h`.
pub fn verify_stationary(se: &StationaryExact, h: f64, tolerance: f64) -> ExactAudit {
    let mut audit = ExactAudit { min_boundary_work: f64::INFINITY, ..ExactAudit::default() };
    let l = se.length;
    for i in 1..AUDIT_POINTS {
        let x = l * i as f64 / AUDIT_POINTS as f64;
        let p = se.eval(x);
        let ds = (se.eval(x + h).sigma - se.eval(x - h).sigma) / (2.0 * h);
        let du = (se.eval(x + h).u - se.eval(x - h).u) / (2.0 * h);
        audit.max_motion_residual = audit.max_motion_residual.max((p.u - ds).abs());
        audit.max_kinematic_residual = audit.max_kinematic_residual.max((du - p.sigma).abs());
        audit.max_stress_excess = audit.max_stress_excess.max(p.sigma.abs() - 1.0);
        audit.samples += 1;
    }
    let end = se.eval(l);
    audit.max_stress_excess = audit.max_stress_excess.max(end.sigma.abs() - 1.0).max(0.0);
    let gap = se.boundary_value - end.u;
    audit.min_boundary_work = end.sigma * gap;
    // Flow rule at the boundary: sigma(L) gap = |gap|.
    audit.max_flow_rule_violation = (gap.abs() - end.sigma * gap).max(0.0);
    audit.finish(tolerance)
}

/// Audits the evolutionary solution on a space-time sample grid with
/// difference step `h`, skipping points within `3h` of the interface.
pub fn verify_evolutionary(ee: &EvolutionaryExact, h: f64, tolerance: f64) -> ExactAudit {
    let mut audit = ExactAudit { min_boundary_work: f64::INFINITY, ..ExactAudit::default() };
    let (l, horizon) = (ee.length, ee.horizon);
    let near_interface = |t: f64, x: f64| {
        let dt_onset = (t - ee.onset_time()).abs() < 3.0 * h;
        let dx_gamma = ee.interface(t).is_some_and(|g| (x - g).abs() < 3.0 * h);
        let dt_gamma = x > 0.0 && (t - ee.passage_time(x)).abs() < 3.0 * h;
        dt_onset || dx_gamma || dt_gamma
    };
    let nt = 80;
    let nx = 80;
    for i in 1..nt {
        let t = horizon * i as f64 / nt as f64;
        for j in 1..nx {
            let x = l * j as f64 / nx as f64;
            let p = ee.eval(t, x);
            audit.max_stress_excess = audit.max_stress_excess.max(p.sigma.abs() - 1.0);
            audit.max_flow_rule_violation = audit.max_flow_rule_violation.max(p.p_rate.abs() - p.sigma * p.p_rate);
            audit.samples += 1;
            if near_interface(t, x) || t < h || t > horizon - h {
                continue;
            }
            let utt = (ee.eval(t + h, x).u - 2.0 * p.u + ee.eval(t - h, x).u) / (h * h);
            let sx = (ee.eval(t, x + h).sigma - ee.eval(t, x - h).sigma) / (2.0 * h);
            let ux = (ee.eval(t, x + h).u - ee.eval(t, x - h).u) / (2.0 * h);
            let ut = (ee.eval(t + h, x).u - ee.eval(t - h, x).u) / (2.0 * h);
            audit.max_motion_residual = audit.max_motion_residual.max((utt - sx).abs());
            audit.max_kinematic_residual = audit.max_kinematic_residual.max((ux - p.sigma - p.p).abs());
            audit.max_kinematic_residual = audit.max_kinematic_residual.max((ut - p.v).abs());
        }
        // Boundary flow rule at x = L with sigma(t, L) and the velocity jump.
        let end = ee.eval(t, l);
        let jump_rate = (ee.boundary_jump(t + h) - ee.boundary_jump((t - h).max(0.0))) / (t + h - (t - h).max(0.0));
        audit.min_boundary_work = audit.min_boundary_work.min(end.sigma * jump_rate);
        // Continuity across the interface.
        if let Some(g) = ee.interface(t) {
            if g > 0.0 && g < l {
                let c = ee.amplitude * t.exp() / l.sinh();
                let (ua, va, sa) = (c * g.sinh(), c * g.sinh(), c * g.cosh());
                let b = ee.eval(t, g);
                let jump = (ua - b.u).abs().max((va - b.v).abs()).max((sa - b.sigma).abs());
                audit.max_interface_jump = audit.max_interface_jump.max(jump);
            }
        }
    }
    audit.max_stress_excess = audit.max_stress_excess.max(0.0);
    audit.finish(tolerance)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn stationary_examples() {
        let se = StationaryExact::new(1.0, 0.5).unwrap();
        assert_eq!(se.regime(), StationaryRegime::Elastic);
        assert_eq!(se.eval(0.0).u, 0.0);
        assert_relative_eq!(se.eval(1.0).sigma, 0.5 / 1f64.tanh(), max_relative = 1e-15);
        assert_relative_eq!(se.eval(1.0).sigma, 0.656_517_642_749_665_6, max_relative = 1e-14);
        assert_relative_eq!(se.eval(1.0).u, 0.5, max_relative = 1e-15);

        let se = StationaryExact::new(1.0, 1.0).unwrap();
        assert_eq!(se.regime(), StationaryRegime::PlasticBoundary);
        assert_relative_eq!(se.eval(1.0).sigma, 1.0, max_relative = 1e-15);
        assert_relative_eq!(se.atom(), 0.238_405_844_044_234, max_relative = 1e-12);
        let neg = StationaryExact::new(1.0, -1.0).unwrap();
        assert_relative_eq!(neg.atom(), -0.238_405_844_044_234, max_relative = 1e-12);
    }

    #[test]
    fn threshold_is_sharp() {
        let th = 1f64.tanh();
        let below = StationaryExact::new(1.0, th * (1.0 - 1e-9)).unwrap();
        let above = StationaryExact::new(1.0, th * (1.0 + 1e-9)).unwrap();
        assert_eq!(below.regime(), StationaryRegime::Elastic);
        assert_eq!(above.regime(), StationaryRegime::PlasticBoundary);
        assert!(below.eval(1.0).sigma.is_finite() && above.eval(1.0).sigma.is_finite());
        assert!((below.eval(0.7).sigma - above.eval(0.7).sigma).abs() < 1e-8);
    }

    #[test]
    fn evolutionary_examples() {
        let ee = EvolutionaryExact::new(1.0, 0.5, 2.0).unwrap();
        assert_relative_eq!(ee.onset_time(), 0.420_805_711_648_113_7, max_relative = 1e-12);
        assert_relative_eq!(ee.amplitude * ee.onset_time().exp(), 1f64.tanh(), max_relative = 1e-15);
        let t0 = ee.onset_time();
        assert_eq!(ee.boundary_jump(t0), 0.0);
        let pre = ee.eval(t0, 1.0);
        let post = ee.eval(t0 + 1e-12, 1.0);
        assert!((pre.u - post.u).abs() < 1e-10 && (pre.sigma - post.sigma).abs() < 1e-10);
        let jump = 0.5 * 2f64.exp() - 1f64.tanh() * (3.0 - (1f64.tanh() / 0.5).ln());
        assert_relative_eq!(ee.boundary_jump(2.0), jump, max_relative = 1e-14);
        assert!(jump > 0.0);
        assert!(EvolutionaryExact::new(1.0, 0.9, 2.0).is_err());
        assert!(EvolutionaryExact::new(1.0, 0.5, 0.1).is_err());
    }

    #[test]
    fn jump_is_monotone_and_interface_recedes() {
        let ee = EvolutionaryExact::new(1.0, 0.5, 2.0).unwrap();
        let t0 = ee.onset_time();
        let mut prev_jump = 0.0;
        let mut prev_gamma = 1.0;
        for i in 1..=1000 {
            let t = 2.0 * i as f64 / 1000.0;
            let j = ee.boundary_jump(t);
            if t <= t0 {
                assert_eq!(j, 0.0);
            } else {
                assert!(j > prev_jump);
                let g = ee.interface(t).unwrap();
                assert!(g < prev_gamma || g == 0.0);
                // The elastic branch reaches sigma = 1 exactly on the interface,
                // until the plastic zone covers the whole bar.
                let c = ee.amplitude * t.exp() / ee.length.sinh();
                if g > 0.0 {
                    assert!((c * g.cosh() - 1.0).abs() < 1e-12);
                }
                prev_gamma = g;
            }
            prev_jump = j;
        }
    }

    #[test]
    fn plastic_rate_is_nonnegative_and_zero_on_interface() {
        let ee = EvolutionaryExact::new(1.0, 0.5, 2.0).unwrap();
        for i in 0..=100 {
            let x = i as f64 / 100.0;
            let p = ee.eval(2.0, x);
            assert!(p.p_rate >= 0.0);
            if p.region == Region::Plastic {
                assert_relative_eq!(p.p_rate, 1.0 - x.tanh().powi(2), max_relative = 1e-14);
            }
        }
        let g = ee.interface(1.5).unwrap();
        assert_eq!(ee.eval(1.5, g).p_rate, 0.0);
    }

    #[test]
    fn audits_pass() {
        let case1 = verify_stationary(&StationaryExact::new(1.0, 0.5).unwrap(), 1e-4, 1e-8);
        assert!(case1.passed(), "{:?}", case1.violations);
        let case2 = verify_stationary(&StationaryExact::new(1.0, 1.0).unwrap(), 1e-4, 1e-8);
        assert!(case2.passed(), "{:?}", case2.violations);
        assert!(case2.min_boundary_work > 0.0);
        let evo = verify_evolutionary(&EvolutionaryExact::new(1.0, 0.5, 2.0).unwrap(), 1e-3, 1e-5);
        assert!(evo.passed(), "{:?}", evo.violations);
        assert!(evo.max_interface_jump <= 1e-10);
    }
}
