mod common;

use std::f64::consts::PI;

use common::rng;
use curved_cc::ccstat::analyze;
use curved_cc::solver::{dedup_classes, fingerprints_match, solve_batch, Branch, FINGERPRINT_TOL};
use curved_cc::{
    canonical_gauge, cc_residual, find_cc, pentatope, special_curve, AmbientVector, GroupElement,
    Init, Sign, SolveOptions, Tolerances,
};
use rand::Rng;
use rand_distr::StandardNormal;

// High-precision roots of the triangle-family multiplier at c = -1/2.
const THETA_FALLING: f64 = 0.9754145029554943;
const THETA_RISING: f64 = 0.470053992671337;

#[test]
fn hyperbolic_pair_matches_closed_form() {
    let mut r = rng(11);
    for k in 0..5 {
        let m = r.random_range(0.5..2.0);
        let half: f64 = r.random_range(0.2..1.2);
        let a = AmbientVector::new(half.sinh(), 0.05, 0.0, half.cosh());
        let b = AmbientVector::new(-half.sinh(), -0.03, 0.02, half.cosh());
        let out = find_cc(
            Sign::Hyperbolic,
            &[m, m],
            Init::Positions(vec![a, b]),
            &SolveOptions::with_seed(k),
        )
        .unwrap();
        assert!(out.converged);
        let d = out.config.distance(0, 1).unwrap();
        let expect = -m / d.sinh().powi(3);
        assert!(
            (out.report.lambda - expect).abs() < 1e-9,
            "{} vs {expect}",
            out.report.lambda
        );
    }
}

#[test]
fn pentatope_recovered_from_noise() {
    let target = pentatope().fingerprint().unwrap();
    let mut r = rng(5);
    let noisy: Vec<AmbientVector> = pentatope()
        .positions()
        .iter()
        .map(|&q| {
            let mut g = || 0.05 * r.sample::<f64, _>(StandardNormal);
            q + AmbientVector::new(g(), g(), g(), g())
        })
        .collect();
    let opts = SolveOptions {
        fixed_lambda: Some(0.0),
        ..Default::default()
    };
    let out = find_cc(Sign::Spherical, &[1.0; 5], Init::Positions(noisy), &opts).unwrap();
    assert!(out.converged);
    assert!(out.report.is_special);
    assert!(fingerprints_match(
        &out.fingerprint,
        &target,
        FINGERPRINT_TOL
    ));
}

#[test]
fn same_seed_same_answer() {
    let opts = SolveOptions::with_seed(42);
    let a = find_cc(Sign::Spherical, &[1.0, 2.0, 3.0], Init::Random, &opts).unwrap();
    let b = find_cc(Sign::Spherical, &[1.0, 2.0, 3.0], Init::Random, &opts).unwrap();
    assert_eq!(a, b);
    let batch = solve_batch(
        Sign::Hyperbolic,
        &[1.0, 1.0, 1.0],
        4,
        &SolveOptions::with_seed(7),
    );
    for (k, out) in batch.into_iter().enumerate() {
        let single = find_cc(
            Sign::Hyperbolic,
            &[1.0, 1.0, 1.0],
            Init::Random,
            &SolveOptions::with_seed(7 + k as u64),
        );
        assert_eq!(out, single);
    }
}

#[test]
fn converged_outcomes_verify_on_recompute() {
    for sign in [Sign::Spherical, Sign::Hyperbolic] {
        let outs = solve_batch(
            sign,
            &[1.0, 1.5, 0.7, 1.2],
            16,
            &SolveOptions::with_seed(100),
        );
        let mut seen = 0;
        for out in outs.into_iter().flatten().filter(|o| o.converged) {
            let again =
                analyze(&out.config, Some(out.report.lambda), &Tolerances::default()).unwrap();
            assert!(again.residual_inf < 1e-10);
            assert_eq!(again, out.report);
            assert_eq!(out.config.fingerprint().unwrap(), out.fingerprint);
            if sign == Sign::Hyperbolic {
                assert!(!out.report.is_special);
                assert!(out.report.lambda < 0.0);
            }
            seen += 1;
        }
        assert!(seen >= 4, "{sign:?}: {seen}");
    }
}

#[test]
fn canonical_gauge_is_invariant() {
    let mut r = rng(77);
    let mut seen = 0;
    for seed in 0..10 {
        let out = find_cc(
            Sign::Hyperbolic,
            &[1.0; 3],
            Init::Random,
            &SolveOptions::with_seed(seed),
        )
        .unwrap();
        if !out.converged {
            continue;
        }
        seen += 1;
        let canon = canonical_gauge(&out.config).unwrap();
        assert!(canon.positions().iter().all(|q| q.z.abs() < 1e-8));
        let g = GroupElement::new(
            r.random_range(-PI..PI),
            r.random_range(-1.0..1.0),
            Sign::Hyperbolic,
        );
        let moved = canonical_gauge(&out.config.transformed(g)).unwrap();
        assert!(fingerprints_match(
            &canon.fingerprint().unwrap(),
            &out.fingerprint,
            1e-9
        ));
        assert!(fingerprints_match(
            &moved.fingerprint().unwrap(),
            &out.fingerprint,
            1e-9
        ));
        let report = cc_residual(&canon, out.report.lambda).unwrap();
        assert!(report.residual_inf < 1e-9);
    }
    assert!(seen >= 8);
}

#[test]
fn special_curve_roots() {
    let entries = special_curve(&[-0.5]);
    let e = &entries[0];
    let falling = e.falling().unwrap();
    let rising = e.rising().unwrap();
    assert_eq!(falling.branch, Branch::Falling);
    assert!((falling.theta - 0.9752).abs() < 1e-3);
    assert!((falling.theta - THETA_FALLING).abs() < 1e-9);
    assert!((rising.theta - THETA_RISING).abs() < 1e-9);
    for root in e.roots.as_ref().unwrap() {
        assert!(root.lambda.abs() < 1e-10);
        assert!(root.max_force < 1e-8);
    }
    let mirrored = special_curve(&[0.5]);
    let m = mirrored[0].falling().unwrap();
    assert!((m.theta - (PI - THETA_FALLING)).abs() < 1e-9);
}

#[test]
fn special_curve_grid() {
    let grid: Vec<f64> = (0..9).map(|k| -0.9 + 0.05 * k as f64).collect();
    let mut last = 0.0;
    for e in special_curve(&grid) {
        let rising = e.rising().expect("root on the grid");
        assert!(rising.lambda.abs() < 1e-10);
        assert!(rising.theta > last, "rising root should increase with c");
        last = rising.theta;
    }
    assert!(special_curve(&[-0.2])[0].roots.is_err());
    assert!(special_curve(&[0.0])[0].roots.is_err());
}

#[test]
fn dedup_groups_by_fingerprint() {
    let outs: Vec<_> = solve_batch(Sign::Spherical, &[1.0; 5], 12, &SolveOptions::with_seed(3))
        .into_iter()
        .flatten()
        .collect();
    let converged = outs.iter().filter(|o| o.converged).count();
    let classes = dedup_classes(&outs, FINGERPRINT_TOL);
    assert_eq!(
        classes.iter().map(|c| c.multiplicity).sum::<usize>(),
        converged
    );
    for (i, a) in classes.iter().enumerate() {
        for b in &classes[i + 1..] {
            assert!(!fingerprints_match(
                &a.representative.fingerprint,
                &b.representative.fingerprint,
                FINGERPRINT_TOL
            ));
        }
    }
    let doubled: Vec<_> = outs.iter().chain(outs.iter()).collect();
    let again = dedup_classes(doubled, FINGERPRINT_TOL);
    assert_eq!(again.len(), classes.len());
    for (a, b) in again.iter().zip(&classes) {
        assert_eq!(a.multiplicity, 2 * b.multiplicity);
    }
}
