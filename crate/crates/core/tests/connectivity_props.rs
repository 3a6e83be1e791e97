mod common;

use common::*;
use proptest::prelude::*;
use quadsep::oracle::{DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION};
use quadsep::{
    components, components_level, components_sublevel, grid_components_2d, separates_affine_level,
    GridSpec, QuadraticFunction, Tag, Target, Tolerances,
};
use rand::Rng;

fn t() -> Tolerances {
    Tolerances::default()
}

fn sample(seed: u64, max_n: usize) -> QuadraticFunction {
    let mut rng = rng(seed);
    let n = rng.random_range(1..=max_n);
    let f = match rng.random_range(0..3) {
        0 => random_quadratic(&mut rng, n, 1.0),
        1 => {
            let want = rng.random_bool(0.5);
            hyperboloid_case(&mut rng, n, want).f
        }
        _ => {
            let d: Vec<f64> = (0..n)
                .map(|_| if rng.random_bool(0.7) { signed(&mut rng, 0.3, 2.0) } else { 0.0 })
                .collect();
            let p = random_invertible(&mut rng, n);
            let s = random_vec(&mut rng, n, 1.0);
            pull_back_diag(&d, signed(&mut rng, 0.1, 2.0), &p, &s)
        }
    };
    if f.is_constant(t()) {
        quad(&vec![-1.0; n], &vec![0.0; n], 1.0)
    } else {
        f
    }
}

const TARGETS: [Target; 3] = [Target::StrictSublevel, Target::Sublevel, Target::Level];

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn sublevel_dichotomy(seed in any::<u64>()) {
        let f = sample(seed, 4);
        if components_sublevel(&f, t()).unwrap().count == 2 {
            prop_assert!(components_sublevel(&f.negate(), t()).unwrap().count <= 1);
        }
    }

    #[test]
    fn positive_scaling_preserves_counts(seed in any::<u64>(), exp in -3.0f64..3.0) {
        let f = sample(seed, 4);
        let c = 10f64.powf(exp);
        for target in TARGETS {
            prop_assert_eq!(
                components(&f, target, t()).unwrap().count,
                components(&f.scale(c), target, t()).unwrap().count
            );
        }
    }

    #[test]
    fn witnesses_satisfy_their_target(seed in any::<u64>()) {
        let f = sample(seed, 4);
        let tol = 1e-9 * f.coefficient_scale().max(1.0);
        for target in TARGETS {
            let r = components(&f, target, t()).unwrap();
            prop_assert_eq!(r.witnesses.len(), r.count);
            for w in &r.witnesses {
                let v = f.value(&w.point);
                prop_assert!(target.holds(v, tol), "{target:?} witness value {v}");
            }
            if r.count == 2 {
                prop_assert_eq!(r.witnesses[0].tag, Tag::Minus);
                prop_assert_eq!(r.witnesses[1].tag, Tag::Plus);
            }
        }
    }
}

#[test]
fn level_witnesses_straddle_certified_hyperplanes() {
    let mut rng = rng(21);
    let mut checked = 0;
    for _ in 0..200 {
        let n = rng.random_range(1..=4);
        let case = hyperboloid_case(&mut rng, n, true);
        let v = separates_affine_level(&case.h, &case.f, t()).unwrap();
        assert!(v.separated);
        let r = components_level(&case.f, t()).unwrap();
        let (a, b) = (&r.witnesses[0].point, &r.witnesses[1].point);
        assert!(case.h.value(a) * case.h.value(b) < 0.0);
        checked += 1;
    }
    assert_eq!(checked, 200);
}

#[test]
fn level_counts_match_the_grid_on_confident_windows() {
    let mut rng = rng(22);
    let mut confident = 0;
    for i in 0..150 {
        let f = if i % 2 == 0 {
            random_quadratic(&mut rng, 2, 1.0)
        } else {
            let want = rng.random_bool(0.5);
            hyperboloid_case(&mut rng, 2, want).f
        };
        let analytic = components_level(&f, t()).unwrap().count;
        let spec = GridSpec::around(&f, DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION, t()).unwrap();
        let grid = grid_components_2d(&f, &spec).unwrap();
        if grid.confident {
            confident += 1;
            assert_eq!(grid.count, analytic, "case {i}: {f:?}");
        }
    }
    assert!(confident >= 135, "only {confident} of 150 confident");
}
