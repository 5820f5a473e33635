//! Sampled projection axioms for every surface kind.

use plastiflow::geometry::{SurfaceSpec, SymMatrix, YieldSurface};
use plastiflow::scenario::DEFAULT_SEED;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

const SAMPLES: usize = 1000;

fn surfaces() -> Vec<YieldSurface> {
    // SPD Hill tensor on the 5 deviatoric coordinates of n = 3.
    let mut b = vec![0.0; 25];
    for i in 0..5 {
        b[i * 5 + i] = 1.0 + 0.5 * i as f64;
    }
    b[1] = 0.3;
    b[5] = 0.3;
    b[3 * 5 + 4] = -0.2;
    b[4 * 5 + 3] = -0.2;
    [
        SurfaceSpec::Interval { lower: -0.5, upper: 2.0 },
        SurfaceSpec::VonMises { dim: 2, radius: 1.0 },
        SurfaceSpec::VonMises { dim: 3, radius: 0.7 },
        SurfaceSpec::Hill { dim: 3, b },
        SurfaceSpec::Hosford { dim: 3, p: 3.0, scale: 1.0 },
        SurfaceSpec::Hosford { dim: 2, p: 8.0, scale: 1.5 },
    ]
    .into_iter()
    .map(|s| YieldSurface::new(s).unwrap())
    .collect()
}

fn proj(s: &YieldSurface, x: &SymMatrix) -> SymMatrix {
    s.project(x).unwrap().point
}

#[test]
fn idempotence_nonexpansiveness_and_ray() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED);
    for s in surfaces() {
        let scale = 3.0 * s.outer_radius();
        for _ in 0..SAMPLES {
            let x = s.random_point(&mut rng, scale);
            let y = s.random_point(&mut rng, scale);
            let px = proj(&s, &x);
            let ppx = proj(&s, &px);
            assert!((ppx - px).norm() <= 1e-12 * (1.0 + px.norm()), "{:?}: idempotence", s.spec());
            let py = proj(&s, &y);
            assert!((px - py).norm() <= (x - y).norm() * (1.0 + 1e-10) + 1e-12, "{:?}: nonexpansive", s.spec());
            let d = s.distance(&x).unwrap();
            if d > 1e-8 {
                let normal = (x - px) * (1.0 / d);
                for k in 0..=6 {
                    let t = 0.5 * k as f64;
                    let q = proj(&s, &(px + normal * t));
                    assert!((q - px).norm() <= 1e-9 * (1.0 + px.norm()), "{:?}: ray at s = {t}", s.spec());
                }
            }
        }
    }
}

#[test]
fn distance_inequalities_and_cylinder() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED + 1);
    for s in surfaces() {
        let r = s.inner_radius();
        let big_r = s.outer_radius();
        let mut exterior = 0;
        while exterior < SAMPLES {
            let x = s.random_point(&mut rng, 3.0 * big_r);
            let d = s.distance(&x).unwrap();
            let dev = if s.is_interval() { x } else { x.deviatoric() };
            if !s.is_interval() {
                assert!((s.distance(&dev).unwrap() - d).abs() <= 1e-12 * (1.0 + d), "{:?}: cylinder", s.spec());
                assert!(d <= dev.norm() + 1e-12 && d >= dev.norm() - big_r - 1e-12);
            }
            if d < 1e-8 {
                continue;
            }
            exterior += 1;
            let n = x - proj(&s, &x);
            let lhs = n.dot(&x);
            assert!(lhs >= d * d - 1e-10 * (1.0 + d * d), "{:?}: (x - Px).x >= d^2", s.spec());
            assert!(lhs >= r * d - 1e-10 * (1.0 + d), "{:?}: (x - Px).x >= r d", s.spec());
        }
    }
}

#[test]
fn gradient_of_squared_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED + 2);
    for s in surfaces() {
        for _ in 0..SAMPLES {
            let x = s.random_point(&mut rng, 3.0 * s.outer_radius());
            let grad = (x - proj(&s, &x)) * 2.0;
            let h = 1e-5 * (1.0 + x.norm());
            let entries = x.upper().to_vec();
            let mut err: f64 = 0.0;
            for k in 0..entries.len() {
                let mut e = vec![0.0; entries.len()];
                e[k] = 1.0;
                let dir = SymMatrix::from_upper(s.dim(), &e);
                let dir = dir * (1.0 / dir.norm());
                let d2 = |t: f64| s.distance(&(x + dir * t)).unwrap().powi(2);
                let fd = (d2(h) - d2(-h)) / (2.0 * h);
                err = err.max((fd - grad.dot(&dir)).abs());
            }
            assert!(err <= 1e-6 * (1.0 + grad.norm()), "{:?}: grad d^2 error {err:e}", s.spec());
        }
    }
}

#[test]
fn hosford_two_is_an_ellipsoid() {
    // sum_{i<j} (s_i - s_j)^2 = 3 |s_D|^2 for n = 3, i.e. Hill with B = 3 I.
    let hosford = YieldSurface::hosford(3, 2.0).unwrap();
    let mut b = vec![0.0; 25];
    for i in 0..5 {
        b[i * 5 + i] = 3.0;
    }
    let hill = YieldSurface::new(SurfaceSpec::Hill { dim: 3, b }).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED + 3);
    for _ in 0..SAMPLES {
        let x = hosford.random_point(&mut rng, 2.0);
        let (a, b) = (hosford.distance(&x).unwrap(), hill.distance(&x).unwrap());
        assert!((a - b).abs() <= 1e-8, "{a} vs {b}");
    }
}

#[test]
fn hosford_curvature_is_positive() {
    let mut rng = ChaCha8Rng::seed_from_u64(DEFAULT_SEED + 4);
    for p in [2.0, 3.0, 4.0, 8.0] {
        let s = YieldSurface::hosford(3, p).unwrap();
        let report = s.estimate_curvature(10_000, &mut rng).unwrap();
        assert!(report.min_quotient.unwrap() > 0.0, "p = {p}: {report:?}");
    }
}
