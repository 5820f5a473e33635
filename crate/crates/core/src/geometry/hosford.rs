//! Hosford yield set `{ sigma trace-free : sum_{i<j} |sigma_i - sigma_j|^p <= scale^p }`.
//!
//! Everything goes through the eigenvalues: the criterion is a symmetric function
//! of the spectrum, so projection and support reduce to problems in `R^n`
//! solved in the eigenframe of the argument.

use super::eigen::{symmetric_eigen, SpectralDecomposition};
use super::symmatrix::SymMatrix;
use super::GeometryError;

/// Absolute tolerance on the projected eigenvalues.
pub(crate) const PROJECTION_TOL: f64 = 1e-10;
/// Iteration cap for the multiplier and inner proximal iterations.
pub(crate) const MAX_ITERATIONS: usize = 200;

const GRID: usize = 96;

#[derive(Clone, Debug, PartialEq)]
pub struct Hosford {
    n: usize,
    p: f64,
    scale: f64,
    level: f64,
}

/// Result of the multistart boundary ascent.
#[derive(Clone, Copy, Debug)]
pub struct SupportAscent {
    pub value: f64,
    /// Largest disagreement between the refined starts.
    pub start_spread: f64,
}

impl Hosford {
    pub fn new(n: usize, p: f64, scale: f64) -> Result<Self, GeometryError> {
        if !(2..=3).contains(&n) {
            return Err(GeometryError::InvalidSurface(format!(
                "Hosford criterion needs n = 2 or 3, got {n}"
            )));
        }
        if !(p >= 2.0) || !p.is_finite() {
            return Err(GeometryError::InvalidSurface(format!(
                "Hosford exponent must satisfy p >= 2, got {p}"
            )));
        }
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(GeometryError::InvalidSurface(format!(
                "Hosford scale must be positive, got {scale}"
            )));
        }
        Ok(Hosford { n, p, scale, level: scale.powf(p) })
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn exponent(&self) -> f64 {
        self.p
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// `sum_{i<j} |x_i - x_j|^p`.
    pub fn spectral_value(&self, x: &[f64]) -> f64 {
        let mut s = 0.0;
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                s += (x[i] - x[j]).abs().powf(self.p);
            }
        }
        s
    }

    fn spectral_gradient(&self, x: &[f64]) -> [f64; 3] {
        let mut g = [0.0; 3];
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                let d = x[i] - x[j];
                let t = self.p * d.abs().powf(self.p - 1.0) * d.signum();
                g[i] += t;
                g[j] -= t;
            }
        }
        g
    }

    fn spectral_hessian(&self, x: &[f64]) -> [[f64; 3]; 3] {
        let mut h = [[0.0; 3]; 3];
        for i in 0..x.len() {
            for j in (i + 1)..x.len() {
                let t = self.p * (self.p - 1.0) * (x[i] - x[j]).abs().powf(self.p - 2.0);
                h[i][i] += t;
                h[j][j] += t;
                h[i][j] -= t;
                h[j][i] -= t;
            }
        }
        h
    }

    /// Criterion value normalized so that the boundary is the level 1.
    pub fn normalized_value(&self, sigma: &SymMatrix) -> f64 {
        let dec = symmetric_eigen(sigma);
        self.spectral_value(dec.values()) / self.level
    }

    /// Gradient of the normalized criterion, as a (trace-free) matrix.
    pub fn normalized_gradient(&self, sigma: &SymMatrix) -> SymMatrix {
        let dec = symmetric_eigen(sigma);
        let g = self.spectral_gradient(dec.values());
        dec.reassemble(&g) * (1.0 / self.level)
    }

    /// Second derivative `D^2F(sigma)[xi, eta]` of the normalized criterion.
    ///
    /// Spectral-function Hessian: the diagonal block in the eigenframe is the
    /// Hessian of the symmetric function, off-diagonal entries pick up the
    /// divided differences of its gradient (the diagonal-derivative limit when
    /// eigenvalues coalesce).
    pub fn normalized_hessian_form(&self, sigma: &SymMatrix, xi: &SymMatrix, eta: &SymMatrix) -> f64 {
        let dec = symmetric_eigen(sigma);
        let lam = dec.values();
        let g = self.spectral_gradient(lam);
        let h = self.spectral_hessian(lam);
        let a = dec.rotate_into(xi);
        let b = dec.rotate_into(eta);
        let n = self.n;
        let spread = lam[n - 1] - lam[0];
        let coalesce = 1e-9 * spread.max(f64::MIN_POSITIVE);
        let mut s = 0.0;
        for i in 0..n {
            for j in 0..n {
                s += h[i][j] * a[i][i] * b[j][j];
                if i != j {
                    let gap = lam[i] - lam[j];
                    let divided = if gap.abs() > coalesce {
                        (g[i] - g[j]) / gap
                    } else {
                        h[i][i] - h[i][j]
                    };
                    s += divided * a[i][j] * b[i][j];
                }
            }
        }
        s / self.level
    }

    fn radius_along(&self, u: &[f64]) -> f64 {
        (self.level / self.spectral_value(u)).powf(1.0 / self.p)
    }

    /// Unit trace-free eigenvalue direction at angle `theta` (n = 3 plane).
    fn plane_direction(theta: f64) -> [f64; 3] {
        let (s, c) = theta.sin_cos();
        let ea = [std::f64::consts::FRAC_1_SQRT_2, -std::f64::consts::FRAC_1_SQRT_2, 0.0];
        let s6 = 6f64.sqrt();
        let eb = [1.0 / s6, 1.0 / s6, -2.0 / s6];
        [c * ea[0] + s * eb[0], c * ea[1] + s * eb[1], c * ea[2] + s * eb[2]]
    }

    /// Inner and outer ball radii `(r_K, R_K)`.
    pub fn radii(&self) -> (f64, f64) {
        if self.n == 2 {
            let r = self.scale / std::f64::consts::SQRT_2;
            return (r, r);
        }
        let rho = |th: f64| self.radius_along(&Self::plane_direction(th));
        let r_min = refine_extremum(|th| -rho(th), GRID).0;
        let r_max = refine_extremum(rho, GRID).0;
        (-r_min, r_max)
    }

    /// Euclidean projection of a trace-free matrix onto the set.
    pub fn project(&self, sigma: &SymMatrix) -> Result<SymMatrix, GeometryError> {
        let dec = symmetric_eigen(sigma);
        let s = dec.values();
        if self.spectral_value(s) <= self.level {
            return Ok(*sigma);
        }
        let mut q = self.project_spectrum(s)?;
        // Snap onto the level set from outside so that projecting again is a no-op.
        let fq = self.spectral_value(&q[..self.n]);
        if fq > self.level {
            let c = (self.level / fq).powf(1.0 / self.p) * (1.0 - 4.0 * f64::EPSILON);
            q.iter_mut().for_each(|v| *v *= c);
        }
        let mut out = dec.reassemble(&q);
        let mean = out.trace() / self.n as f64;
        for i in 0..self.n {
            let v = out.get(i, i) - mean;
            out.set(i, i, v);
        }
        Ok(out)
    }

    /// Solves `q + mu grad f(q) = s`, `f(q) = level` by safeguarded Newton on the
    /// scalar multiplier `mu`, with an inner Newton solve for the proximal point.
    fn project_spectrum(&self, s: &[f64]) -> Result<[f64; 3], GeometryError> {
        let n = s.len();
        let fs = self.spectral_value(s);
        let c = (self.level / fs).powf(1.0 / self.p);
        let mut q = [0.0; 3];
        for i in 0..n {
            q[i] = c * s[i];
        }
        let gq = self.spectral_gradient(&q[..n]);
        let gnorm = norm(&gq[..n]);
        let dist = ((1.0 - c) * norm(s)).max(0.0);
        let mut mu = if gnorm > 0.0 { dist / gnorm } else { 1.0 };
        let (mut lo, mut hi) = (0.0_f64, f64::INFINITY);
        let mut last_h = f64::NAN;
        for _ in 0..MAX_ITERATIONS {
            q = self.prox(s, mu, q)?;
            let h = self.spectral_value(&q[..n]) - self.level;
            last_h = h;
            if h > 0.0 {
                lo = lo.max(mu);
            } else {
                hi = hi.min(mu);
            }
            // dq/dmu = -(I + mu H)^{-1} grad f(q)
            let g = self.spectral_gradient(&q[..n]);
            let jac = self.prox_jacobian(&q[..n], mu);
            let dq = solve_spd(&jac, &g[..n], n);
            let dh: f64 = -(0..n).map(|i| g[i] * dq[i]).sum::<f64>();
            let step_norm = (0..n).map(|i| (dq[i] * h / dh).powi(2)).sum::<f64>().sqrt();
            if h.abs() <= 1e-14 * self.level || (step_norm <= 0.1 * PROJECTION_TOL && h.abs() < 1e-8 * self.level) {
                return Ok(q);
            }
            let mut next = if dh < 0.0 { mu - h / dh } else { f64::NAN };
            if !(next > lo && next < hi) || !next.is_finite() {
                next = if hi.is_finite() { 0.5 * (lo + hi) } else { 2.0 * mu.max(1e-300) };
            }
            if hi.is_finite() && (hi - lo) <= 1e-15 * hi {
                return Ok(q);
            }
            mu = next;
        }
        Err(GeometryError::NonConvergence {
            what: "Hosford projection multiplier",
            iterations: MAX_ITERATIONS,
            residual: last_h.abs(),
        })
    }

    fn prox_jacobian(&self, q: &[f64], mu: f64) -> [[f64; 3]; 3] {
        let h = self.spectral_hessian(q);
        let mut j = [[0.0; 3]; 3];
        for a in 0..q.len() {
            for b in 0..q.len() {
                j[a][b] = mu * h[a][b] + if a == b { 1.0 } else { 0.0 };
            }
        }
        j
    }

    /// Minimizer of `0.5 |q - s|^2 + mu f(q)`: Newton on the optimality
    /// residual `q - s + mu grad f(q)`, backtracking on its norm.
    fn prox(&self, s: &[f64], mu: f64, start: [f64; 3]) -> Result<[f64; 3], GeometryError> {
        let n = s.len();
        let residual = |q: &[f64]| -> [f64; 3] {
            let g = self.spectral_gradient(q);
            let mut r = [0.0; 3];
            for i in 0..n {
                r[i] = q[i] - s[i] + mu * g[i];
            }
            r
        };
        let scale = 1.0 + norm(s);
        let mut q = start;
        let mut r = residual(&q[..n]);
        let mut rn = norm(&r[..n]);
        for _ in 0..MAX_ITERATIONS {
            if rn <= 1e-15 * scale {
                return Ok(q);
            }
            let jac = self.prox_jacobian(&q[..n], mu);
            let step = solve_spd(&jac, &r[..n], n);
            let mut t = 1.0;
            let mut accepted = false;
            for _ in 0..60 {
                let mut trial = q;
                for i in 0..n {
                    trial[i] = q[i] - t * step[i];
                }
                let rt = residual(&trial[..n]);
                let rtn = norm(&rt[..n]);
                if rtn < rn {
                    q = trial;
                    r = rt;
                    rn = rtn;
                    accepted = true;
                    break;
                }
                t *= 0.5;
            }
            if !accepted {
                break;
            }
        }
        if rn <= 1e-12 * scale {
            return Ok(q);
        }
        Err(GeometryError::NonConvergence {
            what: "Hosford proximal step",
            iterations: MAX_ITERATIONS,
            residual: rn,
        })
    }

    /// Support function `sup { tau . q : tau in K }` for trace-free `q`.
    pub fn support(&self, q: &SymMatrix) -> SupportAscent {
        let dec: SpectralDecomposition = symmetric_eigen(q);
        let s = dec.values();
        if self.n == 2 {
            let value = self.level.powf(1.0 / self.p) * (s[1] - s[0]) / 2.0;
            return SupportAscent { value, start_spread: 0.0 };
        }
        let objective = |th: f64| {
            let u = Self::plane_direction(th);
            self.radius_along(&u) * (u[0] * s[0] + u[1] * s[1] + u[2] * s[2])
        };
        let (value, spread) = refine_extremum(objective, GRID);
        SupportAscent { value, start_spread: spread }
    }
}

/// Maximizes a `2 pi`-periodic function: dense grid, then golden-section
/// refinement from the three best grid points. Returns the best value and the
/// spread between the refined starts.
fn refine_extremum(f: impl Fn(f64) -> f64, grid: usize) -> (f64, f64) {
    let h = 2.0 * std::f64::consts::PI / grid as f64;
    let mut samples: Vec<(f64, f64)> = (0..grid).map(|k| (k as f64 * h, f(k as f64 * h))).collect();
    samples.sort_by(|a, b| b.1.total_cmp(&a.1));
    let refined: Vec<f64> = samples
        .iter()
        .take(3)
        .map(|&(th, _)| golden_max(&f, th - h, th + h))
        .collect();
    let best = refined.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let worst = refined.iter().copied().fold(f64::INFINITY, f64::min);
    (best, best - worst)
}

fn golden_max(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let inv_phi = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - inv_phi * (b - a);
    let mut d = a + inv_phi * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a).abs() > 1e-11 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    fc.max(fd).max(f(0.5 * (a + b)))
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

/// Solves `J x = r` for a symmetric positive definite `J` of size `n <= 3`
/// (Cholesky).
fn solve_spd(j: &[[f64; 3]; 3], r: &[f64], n: usize) -> [f64; 3] {
    let mut l = [[0.0; 3]; 3];
    for i in 0..n {
        for k in 0..=i {
            let mut s = j[i][k];
            for m in 0..k {
                s -= l[i][m] * l[k][m];
            }
            if i == k {
                l[i][i] = s.max(1e-300).sqrt();
            } else {
                l[i][k] = s / l[k][k];
            }
        }
    }
    let mut y = [0.0; 3];
    for i in 0..n {
        let mut s = r[i];
        for m in 0..i {
            s -= l[i][m] * y[m];
        }
        y[i] = s / l[i][i];
    }
    let mut x = [0.0; 3];
    for i in (0..n).rev() {
        let mut s = y[i];
        for m in (i + 1)..n {
            s -= l[m][i] * x[m];
        }
        x[i] = s / l[i][i];
    }
    x
}
