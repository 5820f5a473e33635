use std::ffi::{c_char, CStr, CString};
use std::ptr;

use plastiflow_ffi::*;

fn last_error() -> String {
    let mut buf = vec![0 as c_char; 512];
    unsafe {
        pf_last_error_message(buf.as_mut_ptr(), buf.len());
        CStr::from_ptr(buf.as_ptr()).to_string_lossy().into_owned()
    }
}

#[test]
fn surface_roundtrip_and_errors() {
    unsafe {
        let mut s: *mut PfSurface = ptr::null_mut();
        assert_eq!(pf_surface_von_mises(3, 2.0, &mut s), PfStatus::Ok);
        let mut dim = 0;
        assert_eq!(pf_surface_dim(s, &mut dim), PfStatus::Ok);
        assert_eq!(dim, 3);
        // diag(3, -3, 0): deviatoric norm 3 sqrt(2), distance 3 sqrt(2) - 2.
        let x = [3.0, 0.0, 0.0, -3.0, 0.0, 0.0];
        let mut d = 0.0;
        assert_eq!(pf_surface_distance(s, x.as_ptr(), x.len(), &mut d), PfStatus::Ok);
        assert!((d - (18f64.sqrt() - 2.0)).abs() < 1e-12);
        let mut proj = [0.0; 6];
        assert_eq!(pf_surface_project(s, x.as_ptr(), 6, proj.as_mut_ptr()), PfStatus::Ok);
        let mut d2 = 1.0;
        assert_eq!(pf_surface_distance(s, proj.as_ptr(), 6, &mut d2), PfStatus::Ok);
        assert!(d2 < 1e-12);

        assert_eq!(pf_surface_distance(s, x.as_ptr(), 5, &mut d), PfStatus::InvalidArgument);
        assert!(last_error().contains("packed entries"));
        assert_eq!(pf_surface_distance(ptr::null(), x.as_ptr(), 6, &mut d), PfStatus::NullPointer);
        pf_surface_free(s);

        assert_eq!(pf_surface_hosford(3, 0.5, &mut s), PfStatus::InvalidArgument);
        assert!(!last_error().is_empty());
        pf_surface_free(ptr::null_mut());
    }
}

#[test]
fn potential_fenchel_equality() {
    unsafe {
        let mut s: *mut PfSurface = ptr::null_mut();
        assert_eq!(pf_surface_interval(-1.0, 1.0, &mut s), PfStatus::Ok);
        let mut p: *mut PfPotential = ptr::null_mut();
        assert_eq!(pf_potential_new(0.2, 10.0, s, &mut p), PfStatus::Ok);
        pf_surface_free(s);
        for xi in [-3.0, -0.5, 0.0, 1.7, 12.0] {
            let (mut g, mut dg, mut conj) = (0.0, 0.0, 0.0);
            assert_eq!(pf_potential_gamma(p, &xi, 1, &mut g), PfStatus::Ok);
            assert_eq!(pf_potential_dgamma(p, &xi, 1, &mut dg), PfStatus::Ok);
            assert_eq!(pf_potential_conjugate(p, &dg, 1, &mut conj), PfStatus::Ok);
            assert!((g + conj - xi * dg).abs() <= 1e-9 * (1.0 + (xi * dg).abs()), "xi = {xi}");
            let mut relaxed = 0.0;
            assert_eq!(pf_potential_relax(p, &xi, 1, 0.1, &mut relaxed), PfStatus::Ok);
            let mut dgr = 0.0;
            pf_potential_dgamma(p, &relaxed, 1, &mut dgr);
            assert!((relaxed + 0.1 * dgr - xi).abs() < 1e-10);
        }
        assert_eq!(pf_potential_new(1.5, 10.0, ptr::null(), &mut p), PfStatus::NullPointer);
        pf_potential_free(p);
    }
}

const RAMP: &str = r#"
name = "ramp"
[grid]
length = 1.0
nodes = 41
[material]
compliance = 1.0
[surface]
kind = "interval"
lower = -1.0
upper = 1.0
[potential]
alpha = 0.2
lambda = 1000.0
[boundary.left]
kind = "dirichlet"
displacement = { kind = "constant", value = 0.0 }
[boundary.right]
kind = "dirichlet"
displacement = { kind = "exponential", amplitude = 0.5 }
[loads]
[initial]
sigma = { kind = "cosh", amplitude = 0.5, sinh_norm = 1.0 }
velocity = { kind = "sinh", amplitude = 0.5, sinh_norm = 1.0 }
displacement = { kind = "sinh", amplitude = 0.5, sinh_norm = 1.0 }
[time]
t_end = 0.3
"#;

#[test]
fn scenario_run_and_stationary() {
    unsafe {
        let text = CString::new(RAMP).unwrap();
        let mut sc: *mut PfScenario = ptr::null_mut();
        assert_eq!(pf_scenario_from_toml(text.as_ptr(), &mut sc), PfStatus::Ok);
        let mut n = 0;
        pf_scenario_nodes(sc, &mut n);
        assert_eq!(n, 41);
        let mut run: *mut PfRun = ptr::null_mut();
        assert_eq!(pf_dynamic_run(sc, &mut run), PfStatus::Ok);
        let (mut t, mut d, mut e) = (0.0, 0.0, 0.0);
        assert_eq!(pf_run_summary(run, &mut t, &mut d, &mut e), PfStatus::Ok);
        assert!((t - 0.3).abs() < 1e-12 && d == 0.0 && e < 1e-2);
        let mut sigma = vec![0.0; n];
        assert_eq!(pf_run_final_fields(run, sigma.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), n), PfStatus::Ok);
        assert!(sigma.iter().all(|s| s.abs() <= 1.0));
        assert_eq!(pf_run_final_fields(run, sigma.as_mut_ptr(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), 3), PfStatus::BufferTooSmall);
        pf_run_free(run);

        let mut u = vec![0.0; n];
        assert_eq!(pf_stationary_solve(sc, sigma.as_mut_ptr(), u.as_mut_ptr(), n), PfStatus::Ok);
        assert!((u[n - 1] - 0.5).abs() < 1e-3, "u(L) = {}", u[n - 1]);
        pf_scenario_free(sc);

        let bad = CString::new(RAMP.replace("nodes = 41", "nodes = 4")).unwrap();
        assert_eq!(pf_scenario_from_toml(bad.as_ptr(), &mut sc), PfStatus::Validation);
        assert!(last_error().contains("grid"));
    }
}

#[test]
fn exact_evaluators() {
    unsafe {
        let (mut t0, mut jump) = (0.0, 0.0);
        assert_eq!(pf_exact_evolutionary_summary(1.0, 0.5, 2.0, &mut t0, &mut jump), PfStatus::Ok);
        assert!((t0 - (1f64.tanh() / 0.5).ln()).abs() < 1e-14);
        assert!((jump - 1.730228752382041).abs() < 1e-12);
        let mut pt = PfEvolutionaryPoint::default();
        assert_eq!(pf_exact_evolutionary(1.0, 0.5, 2.0, 2.0, 0.5, &mut pt), PfStatus::Ok);
        assert_eq!(pt.region, 3);
        assert_eq!(pt.sigma, 1.0);
        assert_eq!(pf_exact_evolutionary(1.0, 0.5, 2.0, 3.0, 0.5, &mut pt), PfStatus::InvalidArgument);
        assert_eq!(pf_exact_evolutionary(1.0, 2.0, 2.0, 1.0, 0.5, &mut pt), PfStatus::InvalidArgument);

        let mut sp = PfStationaryPoint::default();
        assert_eq!(pf_exact_stationary(1.0, 1.0, 1.0, &mut sp), PfStatus::Ok);
        assert!((sp.atom - (1.0 - 1f64.tanh())).abs() < 1e-12);
        assert_eq!(pf_exact_stationary(1.0, 0.5, 0.5, ptr::null_mut()), PfStatus::NullPointer);
    }
}

#[test]
fn version_is_a_c_string() {
    let v = unsafe { CStr::from_ptr(pf_version()) };
    assert_eq!(v.to_str().unwrap(), env!("CARGO_PKG_VERSION"));
}
