mod common;

use common::*;
use proptest::prelude::*;
use quadsep::oracle::{sample_level_set, DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION};
use quadsep::{
    components_level, grid_components_2d, oracle_separates, separates_level, FailureReason,
    GridSpec, Tag, Tolerances,
};
use rand::Rng;

fn t() -> Tolerances {
    Tolerances::default()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn samples_are_deterministic_and_on_the_level_set(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(1..=4);
        let f = if rng.random_bool(0.5) {
            random_quadratic(&mut rng, n, 1.0)
        } else {
            hyperboloid_case(&mut rng, n, true).f
        };
        let report = components_level(&f, t()).unwrap();
        if report.count == 0 {
            prop_assert!(sample_level_set(&f, 8, seed, t()).is_err());
            return Ok(());
        }
        let a = sample_level_set(&f, 64, seed, t()).unwrap();
        let b = sample_level_set(&f, 64, seed, t()).unwrap();
        prop_assert_eq!(&a, &b);
        let tol = 1e-8 * f.coefficient_scale().max(1.0);
        for s in &a {
            prop_assert!(f.value(&s.point).abs() <= tol, "residual {}", f.value(&s.point));
            prop_assert_eq!(s.sheet == Tag::Single, report.count == 1);
        }
    }
}

#[test]
fn analytic_and_sampled_verdicts_agree() {
    let mut rng = rng(41);
    let mut separated = 0;
    for _ in 0..500 {
        let n = rng.random_range(1..=3);
        let want = rng.random_bool(0.5);
        let case = hyperboloid_case(&mut rng, n, want);
        let lambda = if rng.random_bool(0.5) { 0.0 } else { signed(&mut rng, 0.2, 3.0) };
        let g = lift(&case.f, lambda, &case.h);
        let v = separates_level(&g, &case.f, t()).unwrap();
        let report = oracle_separates(&g, &case.f, 200, 5, t()).unwrap();
        if v.separated {
            separated += 1;
            assert!(report.separated);
            assert_eq!(report.sign_pattern.len(), 2);
            assert_ne!(report.sign_pattern[0], report.sign_pattern[1]);
        }
        if n == 2 && v.failure == Some(FailureReason::LevelSetConnected) {
            let spec = GridSpec::around(&case.f, DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION, t()).unwrap();
            let grid = grid_components_2d(&case.f, &spec).unwrap();
            if grid.confident {
                assert!(grid.count <= 1);
            }
        }
    }
    assert!(separated > 100);
}

#[test]
fn connected_level_sets_stay_connected_on_the_grid() {
    let mut rng = rng(42);
    for _ in 0..100 {
        let f = random_quadratic(&mut rng, 2, 1.0);
        let g = random_quadratic(&mut rng, 2, 1.0);
        let h = lift(&f, 1.0, &quadsep::AffineFunction::new(vec![gauss(&mut rng), gauss(&mut rng)], 0.0));
        for other in [&g, &h] {
            let v = separates_level(other, &f, t()).unwrap();
            if v.failure == Some(FailureReason::LevelSetConnected) {
                let spec = GridSpec::around(&f, DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION, t()).unwrap();
                let grid = grid_components_2d(&f, &spec).unwrap();
                if grid.confident {
                    assert!(grid.count <= 1);
                }
            }
        }
    }
}
