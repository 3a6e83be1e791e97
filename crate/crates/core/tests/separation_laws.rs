mod common;

use common::*;
use proptest::prelude::*;
use quadsep::linalg::dot;
use quadsep::oracle::{oracle_separates, DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION};
use quadsep::{
    combined_separation, grid_separation_2d, separates_affine_level, separates_level, Branch,
    FailureReason, GridSpec, QuadraticFunction, Tolerances,
};
use rand::Rng;

fn t() -> Tolerances {
    Tolerances::default()
}

/// A pair with `B = λA`, built on a hyperboloid or on a generic `f`.
fn multiple_pair(seed: u64) -> (QuadraticFunction, QuadraticFunction) {
    let mut rng = rng(seed);
    let n = rng.random_range(1..=4);
    let lambda = if rng.random_bool(0.2) { 0.0 } else { signed(&mut rng, 0.2, 4.0) };
    if rng.random_bool(0.2) {
        let f = random_quadratic(&mut rng, n, 1.0);
        let h = quadsep::AffineFunction::new(random_vec(&mut rng, n, 1.0), gauss(&mut rng));
        let g = lift(&f, lambda, &h);
        (f, g)
    } else {
        let want = rng.random_bool(0.6);
        let case = hyperboloid_case(&mut rng, n, want);
        let g = lift(&case.f, lambda, &case.h);
        (case.f, g)
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn constructed_pairs_get_the_expected_verdict(seed in any::<u64>()) {
        let mut rng = rng(seed);
        let n = rng.random_range(1..=4);
        let want = rng.random_bool(0.5);
        let case = hyperboloid_case(&mut rng, n, want);
        let v = separates_affine_level(&case.h, &case.f, t()).unwrap();
        prop_assert_eq!(v.separated, case.expect_separated);
        if !v.separated {
            prop_assert_eq!(v.failure, Some(FailureReason::CriterionFailed));
        }
    }

    #[test]
    fn separation_is_mutual(seed in any::<u64>()) {
        let (f, g) = multiple_pair(seed);
        let forward = separates_level(&g, &f, t()).unwrap();
        if forward.separated && g.is_affine(t()).is_none() {
            prop_assert!(separates_level(&f, &g, t()).unwrap().separated);
        }
    }

    #[test]
    fn separators_survive_combination(seed in any::<u64>()) {
        let (f, g) = multiple_pair(seed);
        if separates_level(&g, &f, t()).unwrap().separated {
            let mut rng = rng(seed ^ 7);
            for _ in 0..50 {
                let alpha = rng.random_range(-3.0..3.0);
                let beta = signed(&mut rng, 0.2, 3.0);
                let gamma = signed(&mut rng, 0.2, 3.0);
                let v = combined_separation(gamma, 0.0, alpha, beta, &f, &g, t()).unwrap();
                prop_assert!(v.separated);
            }
        }
    }

    #[test]
    fn verdicts_are_scale_invariant(seed in any::<u64>()) {
        let (f, g) = multiple_pair(seed);
        let mut rng = rng(seed ^ 11);
        let c = signed(&mut rng, 0.01, 100.0);
        let d = signed(&mut rng, 0.01, 100.0);
        let base = separates_level(&g, &f, t()).unwrap();
        let scaled = separates_level(&g.scale(d), &f.scale(c), t()).unwrap();
        prop_assert_eq!(base.separated, scaled.separated);
        if let Some((m, p)) = scaled.witnesses {
            prop_assert!(m.g_value * p.g_value < 0.0);
        }
    }

    #[test]
    fn separated_verdicts_are_sound_against_sampling(seed in any::<u64>()) {
        let (f, g) = multiple_pair(seed);
        let v = separates_level(&g, &f, t()).unwrap();
        if v.separated {
            let report = oracle_separates(&g, &f, 200, seed, t()).unwrap();
            prop_assert!(report.separated, "{:?}", report);
            let (m, p) = v.witnesses.unwrap();
            prop_assert!(m.g_value * p.g_value < 0.0);
            let tol = 1e-8 * f.coefficient_scale().max(1.0);
            prop_assert!(f.value(&m.point).abs() <= tol && f.value(&p.point).abs() <= tol);
        }
    }
}

#[test]
fn unprimed_certificates_bound_f_on_the_hyperplane() {
    let mut rng = rng(31);
    let mut checked = 0;
    while checked < 100 {
        let n = rng.random_range(2..=4);
        let case = hyperboloid_case(&mut rng, n, true);
        let v = separates_affine_level(&case.h, &case.f, t()).unwrap();
        let cert = v.certificate.expect("separated");
        if cert.branch != Branch::Unprimed {
            continue;
        }
        assert!(cert.margin > 0.0);
        for _ in 0..100 {
            let u = random_vec(&mut rng, n - 1, 3.0);
            let mut x = cert.x0.clone();
            for (j, uj) in u.iter().enumerate() {
                for (i, xi) in x.iter_mut().enumerate() {
                    *xi += cert.basis[(i, j)] * uj;
                }
            }
            let h = dot(&case.h.c, &x) + case.h.c0;
            assert!(h.abs() <= 1e-9 * (1.0 + dot(&case.h.c, &case.h.c).sqrt() * 10.0));
            let fx = case.f.value(&x);
            assert!(fx > 0.0 && fx >= cert.margin * (1.0 - 1e-9), "f = {fx}, margin {}", cert.margin);
        }
        checked += 1;
    }
}

#[test]
fn grid_separation_implies_analytic_separation() {
    let mut rng = rng(32);
    let mut established = 0;
    for _ in 0..500 {
        let (f, g) = random_planar_pair(&mut rng);
        let spec = GridSpec::around(&f, DEFAULT_HALF_WIDTH, DEFAULT_RESOLUTION, t()).unwrap();
        let (report, _) = grid_separation_2d(&g, &f, &spec).unwrap();
        if report.confident && report.separated {
            established += 1;
            assert!(separates_level(&g, &f, t()).unwrap().separated, "{f:?} {g:?}");
        }
    }
    assert!(established > 50);
}

#[test]
fn combination_examples() {
    let (f, g) = mutual_hyperbolas();
    let mut rng = rng(33);
    for _ in 0..20 {
        let l = gauss(&mut rng);
        assert!(combined_separation(1.0, 0.0, l, 1.0, &f, &g, t()).unwrap().separated);
    }
    assert!(combined_separation(0.0, 1.0, 1.0, 0.0, &f, &g, t()).unwrap().separated);
    let direct = separates_level(&g, &f, t()).unwrap();
    let identity = combined_separation(1.0, 0.0, 0.0, 1.0, &f, &g, t()).unwrap();
    assert_eq!(direct, identity);
}
