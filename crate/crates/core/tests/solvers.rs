//! Cross-module solver properties.

use plastiflow::dynamic::{run, RunOptions};
use plastiflow::lab::{run_sweep, SweepKind, SweepPlan};
use plastiflow::scenario::{Scenario, ScenarioConfig};

fn ramp(alpha: f64, lambda: f64) -> Scenario {
    Scenario::new(ScenarioConfig::exponential_ramp(0.5, 100, alpha, lambda, 1.5)).unwrap()
}

#[test]
fn inactive_cap_leaves_the_run_unchanged() {
    let a = ramp(0.2, 50.0);
    let b = ramp(0.2, 1e4);
    let ra = run(&a, &RunOptions::from_scenario(&a)).unwrap();
    let rb = run(&b, &RunOptions::from_scenario(&b)).unwrap();
    assert!(ra.diagnostics.sup_distance < 50.0);
    for (x, y) in ra.final_state.sigma.iter().zip(&rb.final_state.sigma) {
        assert!((x - y).abs() <= 1e-12, "{x} vs {y}");
    }
    assert!((ra.ledger.residual - rb.ledger.residual).abs() <= 1e-12);
    assert!((ra.diagnostics.flow_rule_residual - rb.diagnostics.flow_rule_residual).abs() <= 1e-12);
}

#[test]
fn elastic_standing_wave_conserves_energy() {
    let path = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios/standing_wave.cfg");
    let s = Scenario::from_toml(&std::fs::read_to_string(path).unwrap()).unwrap();
    let r = run(&s, &RunOptions::from_scenario(&s)).unwrap();
    assert_eq!(r.diagnostics.sup_distance, 0.0);
    assert_eq!(r.diagnostics.flow_rule_residual, 0.0);
    assert_eq!(r.ledger.dissipation, 0.0);
    assert!(r.diagnostics.relative_energy_residual < 1e-2);
}

#[test]
fn sweep_cells_match_independent_runs() {
    let config = ScenarioConfig::exponential_ramp(0.5, 80, 0.4, 1e3, 1.0);
    let plan = SweepPlan::new(config.clone(), SweepKind::Dynamic, &[0.4, 0.2, 0.1], 1e3);
    let report = run_sweep(&plan).unwrap();
    for cell in &report.cells {
        let mut c = config.clone();
        c.potential.alpha = cell.alpha;
        let s = Scenario::new(c).unwrap();
        let mut opts = RunOptions::from_scenario(&s);
        opts.windows = vec![plan.interior_window];
        let r = run(&s, &opts).unwrap();
        assert_eq!(cell.metrics.sup_distance, Some(r.diagnostics.sup_distance));
        assert_eq!(cell.metrics.h1_interior_sigma, Some(r.diagnostics.h1[0].sigma));
    }
    assert_eq!(run_sweep(&plan).unwrap().to_json(), report.to_json());
}

#[test]
fn yield_onset_does_not_depend_on_alpha() {
    // Before onset the stress is inside K and the potential is inactive.
    let onset = |alpha| {
        let s = ramp(alpha, 1e3);
        run(&s, &RunOptions::from_scenario(&s)).unwrap().diagnostics.first_yield_time.unwrap()
    };
    assert_eq!(onset(0.4), onset(0.05));
}
