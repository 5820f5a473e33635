//! C ABI over the plastiflow library.
//!
//! Objects are opaque handles created by `pf_*_new` style constructors and
//! released with the matching `pf_*_free`. Every fallible call returns a
//! [`PfStatus`]; on failure the message is kept per thread and can be copied
//! out with [`pf_last_error_message`]. Symmetric matrices cross the boundary
//! as the packed upper triangle, row by row (`n (n + 1) / 2` entries).

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use plastiflow::dynamic::{self, RunOptions, RunOutput};
use plastiflow::exact::{EvolutionaryExact, Region, StationaryExact};
use plastiflow::geometry::{packed_len, SymMatrix, YieldSurface};
use plastiflow::potential::RegularizedPotential;
use plastiflow::quasistatic::solve_stationary;
use plastiflow::scenario::Scenario;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PfStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Solver = 4,
    BufferTooSmall = 5,
    Panic = 6,
}

pub struct PfSurface(YieldSurface);
pub struct PfPotential(RegularizedPotential);
pub struct PfScenario(Scenario);
pub struct PfRun(RunOutput);

/// Closed-form fields of the exponential-ramp example at one point.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PfEvolutionaryPoint {
    pub u: f64,
    pub v: f64,
    pub sigma: f64,
    pub p: f64,
    pub p_rate: f64,
    /// 0 before onset, 1 elastic, 2 on the interface, 3 plastic.
    pub region: i32,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct PfStationaryPoint {
    pub u: f64,
    pub sigma: f64,
    /// Boundary plastic atom (nonzero only at `x = L` in the plastic regime).
    pub atom: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: impl Into<String>) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg.into());
}

fn fail(status: PfStatus, msg: impl ToString) -> PfStatus {
    set_error(msg.to_string());
    status
}

/// Runs `f`, converting panics into [`PfStatus::Panic`].
fn guard<F: FnOnce() -> PfStatus>(f: F) -> PfStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => {
            if status == PfStatus::Ok {
                set_error("");
            }
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            fail(PfStatus::Panic, format!("panic: {msg}"))
        }
    }
}

unsafe fn handle<'a, T>(p: *const T) -> Result<&'a T, PfStatus> {
    p.as_ref().ok_or_else(|| fail(PfStatus::NullPointer, "null handle"))
}

unsafe fn out_ref<'a, T>(p: *mut T) -> Result<&'a mut T, PfStatus> {
    p.as_mut().ok_or_else(|| fail(PfStatus::NullPointer, "null output pointer"))
}

unsafe fn slice<'a>(p: *const f64, len: usize) -> Result<&'a [f64], PfStatus> {
    if p.is_null() {
        return Err(fail(PfStatus::NullPointer, "null input array"));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

unsafe fn slice_mut<'a>(p: *mut f64, len: usize) -> Result<&'a mut [f64], PfStatus> {
    if p.is_null() {
        return Err(fail(PfStatus::NullPointer, "null output array"));
    }
    Ok(std::slice::from_raw_parts_mut(p, len))
}

fn matrix(dim: usize, entries: &[f64]) -> Result<SymMatrix, PfStatus> {
    if !(1..=3).contains(&dim) || entries.len() != packed_len(dim) {
        return Err(fail(
            PfStatus::InvalidArgument,
            format!("expected {} packed entries for n = {dim}, got {}", packed_len(dim.clamp(1, 3)), entries.len()),
        ));
    }
    Ok(SymMatrix::from_upper(dim, entries))
}

fn boxed<T>(value: T, out: *mut *mut T) -> PfStatus {
    unsafe { *out = Box::into_raw(Box::new(value)) };
    PfStatus::Ok
}

macro_rules! tri {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(status) => return status,
        }
    };
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn pf_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message (NUL-terminated) into
/// `buf`. Returns the buffer size needed, including the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn pf_last_error_message(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let needed = msg.len() + 1;
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf.cast::<u8>(), n);
            *buf.add(n) = 0;
        }
        needed
    })
}

/// Interval `[lower, upper]` acting on scalars.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_interval(lower: f64, upper: f64, out: *mut *mut PfSurface) -> PfStatus {
    surface_new(plastiflow::geometry::SurfaceSpec::Interval { lower, upper }, out)
}

/// Von Mises ball of `radius` in the deviatoric `dim x dim` matrices.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_von_mises(dim: usize, radius: f64, out: *mut *mut PfSurface) -> PfStatus {
    surface_new(plastiflow::geometry::SurfaceSpec::VonMises { dim, radius }, out)
}

/// Unit Hosford surface with exponent `p`.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_hosford(dim: usize, p: f64, out: *mut *mut PfSurface) -> PfStatus {
    surface_new(plastiflow::geometry::SurfaceSpec::Hosford { dim, p, scale: 1.0 }, out)
}

unsafe fn surface_new(spec: plastiflow::geometry::SurfaceSpec, out: *mut *mut PfSurface) -> PfStatus {
    guard(|| {
        tri!(out_ref(out));
        match YieldSurface::new(spec) {
            Ok(s) => boxed(PfSurface(s), out),
            Err(e) => fail(PfStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `surface` must be null or a handle from a `pf_surface_*` constructor.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_free(surface: *mut PfSurface) {
    if !surface.is_null() {
        drop(Box::from_raw(surface));
    }
}

/// Dimension `n` of the matrices the surface acts on.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_dim(surface: *const PfSurface, out: *mut usize) -> PfStatus {
    guard(|| {
        *tri!(out_ref(out)) = tri!(handle(surface)).0.dim();
        PfStatus::Ok
    })
}

/// Distance from the packed matrix `x` to the set.
///
/// # Safety
/// `x` must hold `len` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_distance(surface: *const PfSurface, x: *const f64, len: usize, out: *mut f64) -> PfStatus {
    guard(|| {
        let s = &tri!(handle(surface)).0;
        let m = tri!(matrix(s.dim(), tri!(slice(x, len))));
        let out = tri!(out_ref(out));
        match s.distance(&m) {
            Ok(d) => {
                *out = d;
                PfStatus::Ok
            }
            Err(e) => fail(PfStatus::Solver, e),
        }
    })
}

/// Projection of the packed matrix `x` onto the set, written to `out`.
///
/// # Safety
/// `x` and `out` must each hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_project(surface: *const PfSurface, x: *const f64, len: usize, out: *mut f64) -> PfStatus {
    guard(|| {
        let s = &tri!(handle(surface)).0;
        let m = tri!(matrix(s.dim(), tri!(slice(x, len))));
        let out = tri!(slice_mut(out, len));
        match s.project(&m) {
            Ok(r) => {
                out.copy_from_slice(r.point.upper());
                PfStatus::Ok
            }
            Err(e) => fail(PfStatus::Solver, e),
        }
    })
}

/// Support function of the set at the packed (trace-free) matrix `q`.
///
/// # Safety
/// `q` must hold `len` values; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_surface_support(surface: *const PfSurface, q: *const f64, len: usize, out: *mut f64) -> PfStatus {
    guard(|| {
        let s = &tri!(handle(surface)).0;
        let m = tri!(matrix(s.dim(), tri!(slice(q, len))));
        let out = tri!(out_ref(out));
        match s.support(&m) {
            Ok(h) => {
                *out = h;
                PfStatus::Ok
            }
            Err(e) => fail(PfStatus::InvalidArgument, e),
        }
    })
}

/// Norton-Hoff potential with exponent `alpha` and cap `lambda` over a copy
/// of `surface`.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_potential_new(
    alpha: f64,
    lambda: f64,
    surface: *const PfSurface,
    out: *mut *mut PfPotential,
) -> PfStatus {
    guard(|| {
        let s = tri!(handle(surface)).0.clone();
        tri!(out_ref(out));
        match RegularizedPotential::new(alpha, lambda, s) {
            Ok(p) => boxed(PfPotential(p), out),
            Err(e) => fail(PfStatus::InvalidArgument, e),
        }
    })
}

/// # Safety
/// `potential` must be null or a handle from [`pf_potential_new`].
#[no_mangle]
pub unsafe extern "C" fn pf_potential_free(potential: *mut PfPotential) {
    if !potential.is_null() {
        drop(Box::from_raw(potential));
    }
}

unsafe fn potential_scalar(
    potential: *const PfPotential,
    x: *const f64,
    len: usize,
    out: *mut f64,
    f: impl FnOnce(&RegularizedPotential, &SymMatrix) -> Result<f64, plastiflow::potential::PotentialError>,
) -> PfStatus {
    guard(|| {
        let p = &tri!(handle(potential)).0;
        let m = tri!(matrix(p.surface().dim(), tri!(slice(x, len))));
        let out = tri!(out_ref(out));
        match f(p, &m) {
            Ok(v) => {
                *out = v;
                PfStatus::Ok
            }
            Err(e) => fail(PfStatus::Solver, e),
        }
    })
}

/// `gamma(x)`.
///
/// # Safety
/// `x` must hold `len` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_potential_gamma(potential: *const PfPotential, x: *const f64, len: usize, out: *mut f64) -> PfStatus {
    potential_scalar(potential, x, len, out, |p, m| p.gamma(m))
}

/// Fenchel conjugate `gamma*(eta)`.
///
/// # Safety
/// `eta` must hold `len` values; other pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_potential_conjugate(
    potential: *const PfPotential,
    eta: *const f64,
    len: usize,
    out: *mut f64,
) -> PfStatus {
    potential_scalar(potential, eta, len, out, |p, m| p.fenchel_conjugate(m))
}

/// Gradient `D gamma(x)`, written to `out`.
///
/// # Safety
/// `x` and `out` must each hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn pf_potential_dgamma(potential: *const PfPotential, x: *const f64, len: usize, out: *mut f64) -> PfStatus {
    guard(|| {
        let p = &tri!(handle(potential)).0;
        let m = tri!(matrix(p.surface().dim(), tri!(slice(x, len))));
        let out = tri!(slice_mut(out, len));
        match p.dgamma(&m) {
            Ok(g) => {
                out.copy_from_slice(g.upper());
                PfStatus::Ok
            }
            Err(e) => fail(PfStatus::Solver, e),
        }
    })
}

/// Implicit relaxation `sigma + tau D gamma(sigma) = sigma_star`.
///
/// # Safety
/// `sigma_star` and `out` must each hold `len` values.
#[no_mangle]
pub unsafe extern "C" fn pf_potential_relax(
    potential: *const PfPotential,
    sigma_star: *const f64,
    len: usize,
    tau: f64,
    out: *mut f64,
) -> PfStatus {
    guard(|| {
        let p = &tri!(handle(potential)).0;
        let m = tri!(matrix(p.surface().dim(), tri!(slice(sigma_star, len))));
        let out = tri!(slice_mut(out, len));
        match p.relax_implicit(&m, tau) {
            Ok(s) => {
                out.copy_from_slice(s.upper());
                PfStatus::Ok
            }
            Err(e) => fail(PfStatus::Solver, e),
        }
    })
}

/// Parses and validates a TOML scenario.
///
/// # Safety
/// `toml` must be a NUL-terminated UTF-8 string; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_scenario_from_toml(toml: *const c_char, out: *mut *mut PfScenario) -> PfStatus {
    guard(|| {
        if toml.is_null() {
            return fail(PfStatus::NullPointer, "null scenario text");
        }
        tri!(out_ref(out));
        let text = match CStr::from_ptr(toml).to_str() {
            Ok(t) => t,
            Err(e) => return fail(PfStatus::InvalidArgument, e),
        };
        match Scenario::from_toml(text) {
            Ok(s) => boxed(PfScenario(s), out),
            Err(e) => fail(PfStatus::Validation, e),
        }
    })
}

/// # Safety
/// `scenario` must be null or a handle from [`pf_scenario_from_toml`].
#[no_mangle]
pub unsafe extern "C" fn pf_scenario_free(scenario: *mut PfScenario) {
    if !scenario.is_null() {
        drop(Box::from_raw(scenario));
    }
}

/// Number of grid nodes.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_scenario_nodes(scenario: *const PfScenario, out: *mut usize) -> PfStatus {
    guard(|| {
        *tri!(out_ref(out)) = tri!(handle(scenario)).0.grid().nodes();
        PfStatus::Ok
    })
}

/// Runs the explicit dynamic scheme with the scenario's own time settings.
///
/// # Safety
/// Pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_dynamic_run(scenario: *const PfScenario, out: *mut *mut PfRun) -> PfStatus {
    guard(|| {
        let s = &tri!(handle(scenario)).0;
        tri!(out_ref(out));
        match dynamic::run(s, &RunOptions::from_scenario(s)) {
            Ok(r) => boxed(PfRun(r), out),
            Err(e) => fail(PfStatus::Solver, e),
        }
    })
}

/// # Safety
/// `run` must be null or a handle from [`pf_dynamic_run`].
#[no_mangle]
pub unsafe extern "C" fn pf_run_free(run: *mut PfRun) {
    if !run.is_null() {
        drop(Box::from_raw(run));
    }
}

/// Final nodal fields. Any output array may be null; non-null ones must
/// hold `len` values, which must equal the node count.
///
/// # Safety
/// See above.
#[no_mangle]
pub unsafe extern "C" fn pf_run_final_fields(
    run: *const PfRun,
    sigma: *mut f64,
    v: *mut f64,
    u: *mut f64,
    p: *mut f64,
    len: usize,
) -> PfStatus {
    guard(|| {
        let state = &tri!(handle(run)).0.final_state;
        if len != state.sigma.len() {
            return fail(PfStatus::BufferTooSmall, format!("need {} values, got {len}", state.sigma.len()));
        }
        for (dst, src) in [(sigma, &state.sigma), (v, &state.v), (u, &state.u), (p, &state.p)] {
            if !dst.is_null() {
                std::slice::from_raw_parts_mut(dst, len).copy_from_slice(src);
            }
        }
        PfStatus::Ok
    })
}

/// Final time, `sup_t sup_x d(sigma)` and relative energy residual. Null
/// outputs are skipped.
///
/// # Safety
/// `run` must be valid; outputs null or valid.
#[no_mangle]
pub unsafe extern "C" fn pf_run_summary(
    run: *const PfRun,
    t_final: *mut f64,
    sup_distance: *mut f64,
    relative_energy_residual: *mut f64,
) -> PfStatus {
    guard(|| {
        let r = &tri!(handle(run)).0;
        for (dst, value) in [
            (t_final, r.final_state.t),
            (sup_distance, r.diagnostics.sup_distance),
            (relative_energy_residual, r.diagnostics.relative_energy_residual),
        ] {
            if let Some(d) = dst.as_mut() {
                *d = value;
            }
        }
        PfStatus::Ok
    })
}

/// Solves the scenario's stationary problem; `sigma` and `u` (either may be
/// null) must hold `len` values equal to the node count.
///
/// # Safety
/// See above.
#[no_mangle]
pub unsafe extern "C" fn pf_stationary_solve(scenario: *const PfScenario, sigma: *mut f64, u: *mut f64, len: usize) -> PfStatus {
    guard(|| {
        let s = &tri!(handle(scenario)).0;
        if len != s.grid().nodes() {
            return fail(PfStatus::BufferTooSmall, format!("need {} values, got {len}", s.grid().nodes()));
        }
        let sol = match solve_stationary(s) {
            Ok(sol) => sol,
            Err(e) => return fail(PfStatus::Solver, e),
        };
        for (dst, src) in [(sigma, &sol.sigma), (u, &sol.u)] {
            if !dst.is_null() {
                std::slice::from_raw_parts_mut(dst, len).copy_from_slice(src);
            }
        }
        PfStatus::Ok
    })
}

/// Exponential-ramp closed form on `[0, length]` with amplitude `amplitude`,
/// valid up to `horizon`, evaluated at `(t, x)`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_exact_evolutionary(
    length: f64,
    amplitude: f64,
    horizon: f64,
    t: f64,
    x: f64,
    out: *mut PfEvolutionaryPoint,
) -> PfStatus {
    guard(|| {
        let out = tri!(out_ref(out));
        let ee = match EvolutionaryExact::new(length, amplitude, horizon) {
            Ok(ee) => ee,
            Err(e) => return fail(PfStatus::InvalidArgument, e),
        };
        if !(0.0..=horizon).contains(&t) || !(0.0..=length).contains(&x) {
            return fail(PfStatus::InvalidArgument, format!("(t, x) = ({t}, {x}) outside [0, {horizon}] x [0, {length}]"));
        }
        let e = ee.eval(t, x);
        let region = match e.region {
            Region::PreOnset => 0,
            Region::Elastic => 1,
            Region::Interface => 2,
            Region::Plastic => 3,
        };
        *out = PfEvolutionaryPoint { u: e.u, v: e.v, sigma: e.sigma, p: e.p, p_rate: e.p_rate, region };
        PfStatus::Ok
    })
}

/// Onset time of plastic flow and boundary jump at `horizon`. Null outputs
/// are skipped.
///
/// # Safety
/// Outputs null or valid.
#[no_mangle]
pub unsafe extern "C" fn pf_exact_evolutionary_summary(
    length: f64,
    amplitude: f64,
    horizon: f64,
    onset_time: *mut f64,
    boundary_jump: *mut f64,
) -> PfStatus {
    guard(|| {
        let ee = match EvolutionaryExact::new(length, amplitude, horizon) {
            Ok(ee) => ee,
            Err(e) => return fail(PfStatus::InvalidArgument, e),
        };
        if let Some(d) = onset_time.as_mut() {
            *d = ee.onset_time();
        }
        if let Some(d) = boundary_jump.as_mut() {
            *d = ee.boundary_jump(horizon);
        }
        PfStatus::Ok
    })
}

/// Stationary closed form with `u(0) = 0`, `u(length) = boundary_value`.
///
/// # Safety
/// `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn pf_exact_stationary(length: f64, boundary_value: f64, x: f64, out: *mut PfStationaryPoint) -> PfStatus {
    guard(|| {
        let out = tri!(out_ref(out));
        let se = match StationaryExact::new(length, boundary_value) {
            Ok(se) => se,
            Err(e) => return fail(PfStatus::InvalidArgument, e),
        };
        if !(0.0..=length).contains(&x) {
            return fail(PfStatus::InvalidArgument, format!("x = {x} outside [0, {length}]"));
        }
        let e = se.eval(x);
        *out = PfStationaryPoint { u: e.u, sigma: e.sigma, atom: e.atom };
        PfStatus::Ok
    })
}
