//! Fenchel equality, implicit relaxation and scenario round-trips.

use std::time::Instant;

use plastiflow::geometry::{SymMatrix, YieldSurface};
use plastiflow::potential::{RadialProfile, RegularizedPotential, ScalarPotential};
use plastiflow::scenario::{ScenarioConfig, DEFAULT_SEED};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PAIRS: [(f64, f64); 6] = [(1.0, 10.0), (0.5, 1e3), (0.2, 2.0), (0.1, 1e3), (0.05, 0.5), (0.05, 1e3)];

fn fenchel_gap(p: &RegularizedPotential, xi: &SymMatrix) -> f64 {
    let g = p.gamma(xi).unwrap();
    let dg = p.dgamma(xi).unwrap();
    let conj = p.fenchel_conjugate(&dg).unwrap();
    let pairing = xi.dot(&dg);
    (g + conj - pairing).abs() / (1.0 + g.abs().max(pairing.abs()))
}

#[test]
fn fenchel_equality_on_random_points() {
    let start = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    let surfaces = [YieldSurface::unit_interval(), YieldSurface::von_mises(3, 1.0).unwrap()];
    let mut worst: f64 = 0.0;
    for (alpha, lambda) in PAIRS {
        for surface in &surfaces {
            let pot = RegularizedPotential::new(alpha, lambda, surface.clone()).unwrap();
            for _ in 0..1000 {
                let xi = surface.random_point(&mut rng, 3.0);
                worst = worst.max(fenchel_gap(&pot, &xi));
            }
        }
    }
    assert!(worst <= 1e-9, "worst relative Fenchel gap {worst:e}");
    assert!(start.elapsed().as_secs_f64() <= 5.0, "took {:?}", start.elapsed());
}

#[test]
fn relaxation_is_first_order_consistent() {
    // sigma+ = sigma* - tau D gamma(sigma*) + O(tau^2).
    let pot = ScalarPotential::new(-1.0, 1.0, RadialProfile::new(0.3, 1e3).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED + 1);
    for _ in 0..200 {
        let s: f64 = rng.gen_range(-3.0..3.0);
        let defect = |tau: f64| (pot.relax(s, tau).unwrap() - (s - tau * pot.dgamma(s).unwrap())).abs();
        let (e1, e2) = (defect(1e-5), defect(5e-6));
        if e1 > 1e-12 {
            let ratio = e1 / e2;
            assert!((3.5..=4.5).contains(&ratio), "s = {s}: ratio {ratio}");
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 256, ..ProptestConfig::default() })]

    #[test]
    fn relaxation_solves_the_implicit_equation(
        s in -50.0f64..50.0, tau in 1e-6f64..10.0, alpha in 0.05f64..1.0, lambda in 0.5f64..1e3,
    ) {
        let pot = ScalarPotential::new(-1.0, 1.0, RadialProfile::new(alpha, lambda).unwrap());
        let r = pot.relax(s, tau).unwrap();
        let residual = r + tau * pot.dgamma(r).unwrap() - s;
        prop_assert!(residual.abs() <= 1e-10 * (1.0 + s.abs()));
        // The relaxed point stays on the same side of K and never overshoots.
        prop_assert!(pot.distance(r) <= pot.distance(s) + 1e-15);
        prop_assert!((r - pot.project(s)) * (s - pot.project(s)) >= -1e-12);
    }

    #[test]
    fn gamma_is_monotone_in_the_distance(
        d1 in 0.0f64..20.0, d2 in 0.0f64..20.0, alpha in 0.05f64..1.0, lambda in 0.5f64..100.0,
    ) {
        let prof = RadialProfile::new(alpha, lambda).unwrap();
        let (lo, hi) = if d1 <= d2 { (d1, d2) } else { (d2, d1) };
        prop_assert!(prof.phi(lo).unwrap() <= prof.phi(hi).unwrap() * (1.0 + 1e-14));
        prop_assert!(prof.dphi(lo).unwrap() <= prof.dphi(hi).unwrap() * (1.0 + 1e-14));
    }

    #[test]
    fn scenario_config_round_trips(
        amplitude in 0.05f64..0.76, nodes in 16usize..500, alpha in 0.01f64..1.0,
        lambda in 1.0f64..1e4, t_end in 0.1f64..3.0,
    ) {
        let config = ScenarioConfig::exponential_ramp(amplitude, nodes, alpha, lambda, t_end);
        let text = config.to_toml().unwrap();
        let back = ScenarioConfig::from_toml(&text).unwrap();
        prop_assert_eq!(&back, &config);
        prop_assert_eq!(back.to_toml().unwrap(), text);
    }
}

#[test]
fn shipped_scenarios_round_trip() {
    let dir = std::path::Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios");
    let mut count = 0;
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        let config = ScenarioConfig::from_toml(&std::fs::read_to_string(&path).unwrap()).unwrap();
        let back = ScenarioConfig::from_toml(&config.to_toml().unwrap()).unwrap();
        assert_eq!(back, config, "{}", path.display());
        plastiflow::scenario::Scenario::new(config).unwrap();
        count += 1;
    }
    assert!(count >= 5);
}
