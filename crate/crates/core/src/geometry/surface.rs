use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::hosford::{Hosford, MAX_ITERATIONS, PROJECTION_TOL};
use super::symmatrix::{deviatoric_dim, SymMatrix};
use super::GeometryError;

/// Serializable description of an admissible set.
///
/// Matrix kinds describe the deviatoric set `K`; the surface then acts on the
/// cylinder `K + R Id` in symmetric-matrix space of dimension `dim`. The
/// interval acts on scalars (`n = 1`) directly.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SurfaceSpec {
    Interval { lower: f64, upper: f64 },
    VonMises { dim: usize, radius: f64 },
    /// `{ y : y^T B y <= 1 }` in deviatoric coordinates; `b` is row-major.
    Hill { dim: usize, b: Vec<f64> },
    Hosford { dim: usize, p: f64, #[serde(default = "unit")] scale: f64 },
}

fn unit() -> f64 {
    1.0
}

impl SurfaceSpec {
    pub fn unit_interval() -> Self {
        SurfaceSpec::Interval { lower: -1.0, upper: 1.0 }
    }
}

/// Curvature lower bound of the boundary.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "value", rename_all = "snake_case")]
pub enum CurvatureBound {
    /// Scalar sets have no boundary curvature.
    NotApplicable,
    Unverified,
    Estimated(f64),
}

impl CurvatureBound {
    pub fn value(&self) -> Option<f64> {
        match self {
            CurvatureBound::Estimated(c) => Some(*c),
            _ => None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProjectionResult {
    pub point: SymMatrix,
    pub distance: f64,
    pub inside: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurvatureReport {
    pub bound: CurvatureBound,
    pub samples: usize,
    pub min_quotient: Option<f64>,
    pub max_quotient: Option<f64>,
}

#[derive(Clone, Debug, PartialEq)]
struct Ellipsoid {
    b: DMatrix<f64>,
    b_inv: DMatrix<f64>,
    eigvals: DVector<f64>,
    eigvecs: DMatrix<f64>,
}

#[derive(Clone, Debug, PartialEq)]
enum Body {
    Interval { lower: f64, upper: f64 },
    Ball { radius: f64 },
    Ellipsoid(Box<Ellipsoid>),
    Hosford(Hosford),
}

#[derive(Clone, Debug, PartialEq)]
pub struct YieldSurface {
    spec: SurfaceSpec,
    dim: usize,
    body: Body,
    inner_radius: f64,
    outer_radius: f64,
    curvature: CurvatureBound,
}

impl YieldSurface {
    pub fn new(spec: SurfaceSpec) -> Result<Self, GeometryError> {
        let invalid = |msg: String| Err(GeometryError::InvalidSurface(msg));
        let (dim, body, r, big_r) = match &spec {
            SurfaceSpec::Interval { lower, upper } => {
                if !(lower.is_finite() && upper.is_finite()) || !(*lower < 0.0 && 0.0 < *upper) {
                    return invalid(format!("interval [{lower}, {upper}] must contain 0 in its interior"));
                }
                (1, Body::Interval { lower: *lower, upper: *upper }, (-lower).min(*upper), (-lower).max(*upper))
            }
            SurfaceSpec::VonMises { dim, radius } => {
                check_matrix_dim(*dim)?;
                if !(*radius > 0.0 && radius.is_finite()) {
                    return invalid(format!("Von Mises radius must be positive, got {radius}"));
                }
                (*dim, Body::Ball { radius: *radius }, *radius, *radius)
            }
            SurfaceSpec::Hill { dim, b } => {
                check_matrix_dim(*dim)?;
                let m = deviatoric_dim(*dim);
                if b.len() != m * m {
                    return invalid(format!("Hill tensor for n = {dim} needs {m}x{m} = {} entries, got {}", m * m, b.len()));
                }
                let bm = DMatrix::from_row_slice(m, m, b);
                if (&bm - bm.transpose()).abs().max() > 1e-12 * (1.0 + bm.abs().max()) {
                    return invalid("Hill tensor must be symmetric".into());
                }
                let eig = SymmetricEigen::new(bm.clone());
                let lmin = eig.eigenvalues.min();
                let lmax = eig.eigenvalues.max();
                if !(lmin > 0.0) {
                    return invalid(format!("Hill tensor must be positive definite (smallest eigenvalue {lmin})"));
                }
                let b_inv = &eig.eigenvectors
                    * DMatrix::from_diagonal(&eig.eigenvalues.map(|l| 1.0 / l))
                    * eig.eigenvectors.transpose();
                let ell = Ellipsoid { b: bm, b_inv, eigvals: eig.eigenvalues, eigvecs: eig.eigenvectors };
                (*dim, Body::Ellipsoid(Box::new(ell)), 1.0 / lmax.sqrt(), 1.0 / lmin.sqrt())
            }
            SurfaceSpec::Hosford { dim, p, scale } => {
                let h = Hosford::new(*dim, *p, *scale)?;
                let (r, big_r) = h.radii();
                (*dim, Body::Hosford(h), r, big_r)
            }
        };
        let curvature = if dim == 1 { CurvatureBound::NotApplicable } else { CurvatureBound::Unverified };
        Ok(YieldSurface { spec, dim, body, inner_radius: r, outer_radius: big_r, curvature })
    }

    pub fn unit_interval() -> Self {
        YieldSurface::new(SurfaceSpec::unit_interval()).expect("unit interval is valid")
    }

    pub fn von_mises(dim: usize, radius: f64) -> Result<Self, GeometryError> {
        YieldSurface::new(SurfaceSpec::VonMises { dim, radius })
    }

    pub fn hosford(dim: usize, p: f64) -> Result<Self, GeometryError> {
        YieldSurface::new(SurfaceSpec::Hosford { dim, p, scale: 1.0 })
    }

    pub fn spec(&self) -> &SurfaceSpec {
        &self.spec
    }

    /// Matrix dimension `n` of the ambient space (1 for intervals).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_interval(&self) -> bool {
        matches!(self.body, Body::Interval { .. })
    }

    /// `(lower, upper)` for interval surfaces.
    pub fn interval_bounds(&self) -> Option<(f64, f64)> {
        match self.body {
            Body::Interval { lower, upper } => Some((lower, upper)),
            _ => None,
        }
    }

    pub fn inner_radius(&self) -> f64 {
        self.inner_radius
    }

    pub fn outer_radius(&self) -> f64 {
        self.outer_radius
    }

    pub fn curvature(&self) -> CurvatureBound {
        self.curvature
    }

    /// Copy of the surface carrying a sampled curvature bound.
    pub fn with_estimated_curvature<R: Rng>(&self, samples: usize, rng: &mut R) -> Result<Self, GeometryError> {
        let report = self.estimate_curvature(samples, rng)?;
        let mut s = self.clone();
        s.curvature = report.bound;
        Ok(s)
    }

    fn check_point(&self, x: &SymMatrix) -> Result<(), GeometryError> {
        if x.dim() != self.dim {
            return Err(GeometryError::DimensionMismatch { expected: self.dim, got: x.dim() });
        }
        Ok(())
    }

    /// Projection of a trace-free matrix (or a scalar, for intervals) onto `K`.
    fn project_body(&self, y: &SymMatrix) -> Result<SymMatrix, GeometryError> {
        match &self.body {
            Body::Interval { lower, upper } => Ok(SymMatrix::scalar(y.get(0, 0).clamp(*lower, *upper))),
            Body::Ball { radius } => {
                let r = y.norm();
                Ok(if r <= *radius { *y } else { *y * (radius / r) })
            }
            Body::Ellipsoid(ell) => {
                let c = DVector::from_vec(y.deviatoric_coords());
                let p = ell.project(&c)?;
                Ok(SymMatrix::from_deviatoric_coords(self.dim, p.as_slice()))
            }
            Body::Hosford(h) => h.project(y),
        }
    }

    /// Projection onto the admissible set; for matrix surfaces this is the
    /// cylinder `K + R Id`, so the hydrostatic part passes through unchanged.
    pub fn project(&self, x: &SymMatrix) -> Result<ProjectionResult, GeometryError> {
        self.check_point(x)?;
        if self.dim == 1 {
            let point = self.project_body(x)?;
            let distance = (x.get(0, 0) - point.get(0, 0)).abs();
            return Ok(ProjectionResult { point, distance, inside: distance == 0.0 });
        }
        let (dev, tr) = x.deviatoric_split();
        let pd = self.project_body(&dev)?;
        let distance = (dev - pd).norm();
        let point = if distance == 0.0 { *x } else { pd + SymMatrix::identity(self.dim) * (tr / self.dim as f64) };
        Ok(ProjectionResult { point, distance, inside: distance == 0.0 })
    }

    pub fn distance(&self, x: &SymMatrix) -> Result<f64, GeometryError> {
        Ok(self.project(x)?.distance)
    }

    pub fn contains(&self, x: &SymMatrix) -> Result<bool, GeometryError> {
        Ok(self.project(x)?.inside)
    }

    /// Support function `H(q) = sup { tau . q : tau in K }`; `q` must be
    /// trace-free for matrix surfaces.
    pub fn support(&self, q: &SymMatrix) -> Result<f64, GeometryError> {
        self.check_point(q)?;
        if self.dim > 1 {
            let tr = q.trace();
            if tr.abs() > 1e-10 * (1.0 + q.norm()) {
                return Err(GeometryError::NotDeviatoric { trace: tr });
            }
        }
        Ok(match &self.body {
            Body::Interval { lower, upper } => {
                let v = q.get(0, 0);
                (lower * v).max(upper * v)
            }
            Body::Ball { radius } => radius * q.deviatoric().norm(),
            Body::Ellipsoid(ell) => {
                let c = DVector::from_vec(q.deviatoric_coords());
                c.dot(&(&ell.b_inv * &c)).max(0.0).sqrt()
            }
            Body::Hosford(h) => h.support(&q.deviatoric()).value,
        })
    }

    /// Support value together with the multistart spread (zero for closed forms).
    pub fn support_with_spread(&self, q: &SymMatrix) -> Result<(f64, f64), GeometryError> {
        if let Body::Hosford(h) = &self.body {
            self.check_point(q)?;
            let a = h.support(&q.deviatoric());
            return Ok((a.value, a.start_spread));
        }
        Ok((self.support(q)?, 0.0))
    }

    /// `D Pi(x) v . v` by central differences of the projection with step
    /// `1e-5 (1 + |x|)`.
    pub fn projection_differential(&self, x: &SymMatrix, v: &SymMatrix) -> Result<f64, GeometryError> {
        self.check_point(x)?;
        self.check_point(v)?;
        let d = self.distance(x)?;
        let h = 1e-5 * (1.0 + x.norm());
        let vn = v.norm();
        if d <= 1e-8 || d <= 2.0 * h * vn {
            return Err(GeometryError::DegenerateInput(format!(
                "distance {d:e} too small for differencing with step {h:e}"
            )));
        }
        let plus = self.project(&(*x + *v * h))?.point;
        let minus = self.project(&(*x - *v * h))?.point;
        Ok((plus - minus).dot(v) / (2.0 * h))
    }

    /// Defining function `F` of `K = {F <= 1}` on deviatoric coordinates,
    /// together with its degree of homogeneity.
    fn defining_value(&self, y: &[f64]) -> f64 {
        match &self.body {
            Body::Interval { .. } => f64::NAN,
            Body::Ball { radius } => y.iter().map(|v| v * v).sum::<f64>() / (radius * radius),
            Body::Ellipsoid(ell) => {
                let c = DVector::from_column_slice(y);
                c.dot(&(&ell.b * &c))
            }
            Body::Hosford(h) => h.normalized_value(&SymMatrix::from_deviatoric_coords(self.dim, y)),
        }
    }

    fn homogeneity(&self) -> f64 {
        match &self.body {
            Body::Hosford(h) => h.exponent(),
            _ => 2.0,
        }
    }

    /// Gradient and Hessian of the defining function in deviatoric coordinates.
    fn defining_derivatives(&self, y: &[f64]) -> (DVector<f64>, DMatrix<f64>) {
        let m = y.len();
        match &self.body {
            Body::Interval { .. } => unreachable!("intervals have no defining function"),
            Body::Ball { radius } => {
                let r2 = radius * radius;
                (DVector::from_column_slice(y) * (2.0 / r2), DMatrix::identity(m, m) * (2.0 / r2))
            }
            Body::Ellipsoid(ell) => {
                let c = DVector::from_column_slice(y);
                (&ell.b * c * 2.0, &ell.b * 2.0)
            }
            Body::Hosford(h) => {
                let sigma = SymMatrix::from_deviatoric_coords(self.dim, y);
                let grad = DVector::from_vec(h.normalized_gradient(&sigma).deviatoric_coords());
                let basis: Vec<SymMatrix> = (0..m)
                    .map(|k| {
                        let mut e = vec![0.0; m];
                        e[k] = 1.0;
                        SymMatrix::from_deviatoric_coords(self.dim, &e)
                    })
                    .collect();
                let mut hess = DMatrix::zeros(m, m);
                for i in 0..m {
                    for j in i..m {
                        let v = h.normalized_hessian_form(&sigma, &basis[i], &basis[j]);
                        hess[(i, j)] = v;
                        hess[(j, i)] = v;
                    }
                }
                (grad, hess)
            }
        }
    }

    /// Second derivative `D^2 F(sigma) xi . xi` of the defining function, for
    /// trace-free `sigma`, `xi` (matrix surfaces only).
    pub fn defining_hessian_form(&self, sigma: &SymMatrix, xi: &SymMatrix) -> Result<f64, GeometryError> {
        if self.dim == 1 {
            return Err(GeometryError::NotApplicable("scalar sets have no defining function".into()));
        }
        self.check_point(sigma)?;
        let (_, hess) = self.defining_derivatives(&sigma.deviatoric_coords());
        let c = DVector::from_vec(xi.deviatoric_coords());
        Ok(c.dot(&(hess * &c)))
    }

    /// Minimal tangential Hessian quotient `D^2F(y) v . v / |DF(y)|` at the
    /// boundary point reached along deviatoric direction `u`.
    fn curvature_quotient(&self, u: &[f64]) -> Result<f64, GeometryError> {
        let fu = self.defining_value(u);
        let y: Vec<f64> = u.iter().map(|v| v * fu.powf(-1.0 / self.homogeneity())).collect();
        let (grad, hess) = self.defining_derivatives(&y);
        let gnorm = grad.norm();
        if !(gnorm > 1e-300) || !gnorm.is_finite() {
            return Err(GeometryError::NotSmooth(format!("vanishing normal at {y:?}")));
        }
        let tangent = tangent_basis(&(grad / gnorm));
        let t = tangent.transpose() * hess * &tangent;
        let eig = SymmetricEigen::new(t);
        let q = eig.eigenvalues.min() / gnorm;
        if !q.is_finite() {
            return Err(GeometryError::NotSmooth(format!("non-finite curvature quotient at {y:?}")));
        }
        Ok(q)
    }

    /// Sampled lower bound on the second fundamental form of the boundary.
    ///
    /// Boundary points are reached radially from Gaussian deviatoric
    /// directions; at each one the tangential Hessian of the defining function
    /// is minimized exactly over tangent directions. The smallest samples are
    /// then polished by a compass search over the direction.
    pub fn estimate_curvature<R: Rng>(&self, samples: usize, rng: &mut R) -> Result<CurvatureReport, GeometryError> {
        if self.dim == 1 {
            return Ok(CurvatureReport {
                bound: CurvatureBound::NotApplicable,
                samples: 0,
                min_quotient: None,
                max_quotient: None,
            });
        }
        let m = deviatoric_dim(self.dim);
        let mut found: Vec<(f64, Vec<f64>)> = Vec::with_capacity(samples);
        let mut max_q = f64::NEG_INFINITY;
        for _ in 0..samples.max(1) {
            let u = random_direction(rng, m);
            let q = self.curvature_quotient(&u)?;
            max_q = max_q.max(q);
            found.push((q, u));
        }
        found.sort_by(|a, b| a.0.total_cmp(&b.0));
        let mut best = found[0].0;
        for (q0, u0) in found.iter().take(4) {
            best = best.min(self.polish_curvature(*q0, u0.clone())?);
        }
        if !(best > 0.0) {
            return Err(GeometryError::NotSmooth(format!(
                "curvature quotient {best:e} is not positive; widen sampling or check the exponent"
            )));
        }
        Ok(CurvatureReport {
            bound: CurvatureBound::Estimated(best),
            samples,
            min_quotient: Some(best),
            max_quotient: Some(max_q),
        })
    }

    fn polish_curvature(&self, mut q: f64, mut u: Vec<f64>) -> Result<f64, GeometryError> {
        let mut step = 0.1;
        while step > 1e-7 {
            let mut improved = false;
            for k in 0..u.len() {
                for sign in [1.0, -1.0] {
                    let mut trial = u.clone();
                    trial[k] += sign * step;
                    let nrm = trial.iter().map(|v| v * v).sum::<f64>().sqrt();
                    trial.iter_mut().for_each(|v| *v /= nrm);
                    let qt = self.curvature_quotient(&trial)?;
                    if qt < q {
                        q = qt;
                        u = trial;
                        improved = true;
                    }
                }
            }
            if !improved {
                step *= 0.5;
            }
        }
        Ok(q)
    }

    /// Checks `B(0, r_K) in K in B(0, R_K)` along `probes` random directions.
    pub fn check_radii<R: Rng>(&self, probes: usize, rng: &mut R) -> Result<(), GeometryError> {
        if self.dim == 1 {
            return Ok(());
        }
        let m = deviatoric_dim(self.dim);
        for _ in 0..probes {
            let u = random_direction(rng, m);
            let inner: Vec<f64> = u.iter().map(|v| v * self.inner_radius).collect();
            let outer: Vec<f64> = u.iter().map(|v| v * self.outer_radius * 1.01).collect();
            if self.defining_value(&inner) > 1.0 + 1e-9 {
                return Err(GeometryError::InvalidSurface(format!("inner radius {} leaves K", self.inner_radius)));
            }
            if self.defining_value(&outer) <= 1.0 {
                return Err(GeometryError::InvalidSurface(format!("K is not inside radius {}", self.outer_radius)));
            }
        }
        Ok(())
    }

    /// Random point of the ambient space, entries uniform in `[-scale, scale]`.
    pub fn random_point<R: Rng>(&self, rng: &mut R, scale: f64) -> SymMatrix {
        let len = self.dim * (self.dim + 1) / 2;
        let e: Vec<f64> = (0..len).map(|_| rng.gen_range(-scale..=scale)).collect();
        SymMatrix::from_upper(self.dim, &e)
    }

    /// Random point of `K` (uniform radius fraction along a random direction).
    pub fn random_member<R: Rng>(&self, rng: &mut R) -> Result<SymMatrix, GeometryError> {
        if let Body::Interval { lower, upper } = self.body {
            return Ok(SymMatrix::scalar(rng.gen_range(lower..=upper)));
        }
        let m = deviatoric_dim(self.dim);
        let u = random_direction(rng, m);
        let f = self.defining_value(&u);
        let t: f64 = rng.gen_range(0.0..=1.0);
        let scale = t * f.powf(-1.0 / self.homogeneity());
        let y: Vec<f64> = u.iter().map(|v| v * scale).collect();
        let mut x = SymMatrix::from_deviatoric_coords(self.dim, &y);
        let shift: f64 = rng.gen_range(-1.0..=1.0);
        for i in 0..self.dim {
            let v = x.get(i, i) + shift;
            x.set(i, i, v);
        }
        Ok(x)
    }
}

impl Ellipsoid {
    /// Projection onto `{ y^T B y <= 1 }`: in the eigenframe of `B`, find
    /// `mu >= 0` with `sum l_i z_i^2 / (1 + mu l_i)^2 = 1`. The secular function
    /// is convex and decreasing, so Newton from `mu = 0` increases monotonically
    /// to the root.
    fn project(&self, y: &DVector<f64>) -> Result<DVector<f64>, GeometryError> {
        let z = self.eigvecs.transpose() * y;
        let l = &self.eigvals;
        let val: f64 = z.iter().zip(l.iter()).map(|(zi, li)| li * zi * zi).sum();
        if val <= 1.0 {
            return Ok(y.clone());
        }
        let mut mu = 0.0;
        let mut h = val - 1.0;
        for _ in 0..MAX_ITERATIONS {
            let mut dh = 0.0;
            h = -1.0;
            for (zi, li) in z.iter().zip(l.iter()) {
                let den = 1.0 + mu * li;
                h += li * zi * zi / (den * den);
                dh -= 2.0 * li * li * zi * zi / (den * den * den);
            }
            let step = h / dh;
            mu -= step;
            if h.abs() < 1e-15 || (step.abs() <= 1e-16 * mu.abs() && h.abs() < 1e-12) {
                let q = DVector::from_iterator(z.len(), z.iter().zip(l.iter()).map(|(zi, li)| zi / (1.0 + mu * li)));
                let p = &self.eigvecs * q;
                return Ok(p);
            }
        }
        if h.abs() <= PROJECTION_TOL {
            let q = DVector::from_iterator(z.len(), z.iter().zip(l.iter()).map(|(zi, li)| zi / (1.0 + mu * li)));
            return Ok(&self.eigvecs * q);
        }
        Err(GeometryError::NonConvergence { what: "ellipsoid projection", iterations: MAX_ITERATIONS, residual: h.abs() })
    }
}

fn check_matrix_dim(dim: usize) -> Result<(), GeometryError> {
    if !(2..=3).contains(&dim) {
        return Err(GeometryError::InvalidSurface(format!(
            "matrix yield surfaces need n = 2 or 3, got {dim} (use an interval in 1D)"
        )));
    }
    Ok(())
}

fn random_direction<R: Rng>(rng: &mut R, m: usize) -> Vec<f64> {
    loop {
        let u: Vec<f64> = (0..m).map(|_| rng.sample::<f64, _>(StandardNormal)).collect();
        let nrm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
        if nrm > 1e-8 {
            return u.into_iter().map(|v| v / nrm).collect();
        }
    }
}

/// Orthonormal basis (as columns) of the complement of the unit vector `n`.
fn tangent_basis(n: &DVector<f64>) -> DMatrix<f64> {
    let m = n.len();
    // Householder reflector sending e_k to n; its other columns span n-perp.
    let k = n.iamax();
    let mut w = -n.clone();
    w[k] += 1.0;
    let wn = w.norm_squared();
    let mut h = DMatrix::identity(m, m);
    if wn > 1e-30 {
        h -= &w * w.transpose() * (2.0 / wn);
    }
    let cols: Vec<usize> = (0..m).filter(|&c| c != k).collect();
    DMatrix::from_fn(m, m - 1, |i, j| h[(i, cols[j])])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tangent_basis_is_orthonormal_complement() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for m in 2..=5 {
            let n = DVector::from_vec(random_direction(&mut rng, m));
            let t = tangent_basis(&n);
            let gram = t.transpose() * &t;
            assert!((gram - DMatrix::identity(m - 1, m - 1)).abs().max() < 1e-14);
            assert!((t.transpose() * &n).abs().max() < 1e-14);
        }
    }

    #[test]
    fn interval_must_contain_origin() {
        assert!(YieldSurface::new(SurfaceSpec::Interval { lower: 0.5, upper: 1.0 }).is_err());
        let s = YieldSurface::new(SurfaceSpec::Interval { lower: -2.0, upper: 1.0 }).unwrap();
        assert_eq!((s.inner_radius(), s.outer_radius()), (1.0, 2.0));
    }

    #[test]
    fn hill_rejects_indefinite_tensor() {
        let b = vec![1.0, 0.0, 0.0, -1.0];
        assert!(YieldSurface::new(SurfaceSpec::Hill { dim: 2, b }).is_err());
        assert!(YieldSurface::new(SurfaceSpec::Hill { dim: 2, b: vec![1.0; 3] }).is_err());
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let s = YieldSurface::von_mises(3, 1.0).unwrap();
        let err = s.project(&SymMatrix::zeros(2)).unwrap_err();
        assert_eq!(err, GeometryError::DimensionMismatch { expected: 3, got: 2 });
    }

    #[test]
    fn support_requires_trace_free_argument() {
        let s = YieldSurface::von_mises(3, 1.0).unwrap();
        assert!(matches!(s.support(&SymMatrix::identity(3)), Err(GeometryError::NotDeviatoric { .. })));
    }
}
