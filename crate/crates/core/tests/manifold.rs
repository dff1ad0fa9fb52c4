use curved_cc::manifold::{
    geodesic_distance, on_manifold, poincare_ball, polar_zw, project_tangent, retract, sdot,
    stereographic, RHO_TOL,
};
use curved_cc::{AmbientVector, Error, GroupElement, Sign};
use proptest::prelude::*;

fn s3_point() -> impl Strategy<Value = AmbientVector> {
    prop::array::uniform4(-1.0..1.0f64)
        .prop_filter("away from origin", |a| {
            a.iter().map(|x| x * x).sum::<f64>() > 1e-2
        })
        .prop_map(|a| retract(AmbientVector::from_array(a), Sign::Spherical).unwrap())
}

fn h3_point() -> impl Strategy<Value = AmbientVector> {
    prop::array::uniform3(-3.0..3.0f64)
        .prop_map(|[x, y, z]| AmbientVector::new(x, y, z, (1.0 + x * x + y * y + z * z).sqrt()))
}

fn point(sign: Sign) -> BoxedStrategy<AmbientVector> {
    match sign {
        Sign::Spherical => s3_point().boxed(),
        Sign::Hyperbolic => h3_point().boxed(),
    }
}

fn sign() -> impl Strategy<Value = Sign> {
    prop_oneof![Just(Sign::Spherical), Just(Sign::Hyperbolic)]
}

fn close(a: AmbientVector, b: AmbientVector, tol: f64) -> bool {
    (a - b)
        .to_array()
        .iter()
        .all(|d| d.abs() <= tol * (1.0 + a.euclid_norm()))
}

proptest! {
    #[test]
    fn group_preserves_sdot(
        (s, u, v) in sign().prop_flat_map(|s| (Just(s), point(s), point(s))),
        psi in -6.0..6.0f64,
        chi in -1.5..1.5f64,
    ) {
        let g = GroupElement::new(psi, chi, s);
        let before = sdot(u, v, s);
        let after = sdot(g.apply(u), g.apply(v), s);
        prop_assert!((before - after).abs() < 1e-12 * (1.0 + before.abs()));
    }

    #[test]
    fn group_inverse_round_trip(
        (s, u) in sign().prop_flat_map(|s| (Just(s), point(s))),
        psi in -6.0..6.0f64,
        chi in -1.5..1.5f64,
    ) {
        let g = GroupElement::new(psi, chi, s);
        prop_assert!(close(g.inverse().apply(g.apply(u)), u, 1e-12));
    }

    #[test]
    fn group_keeps_points_on_manifold(
        (s, u) in sign().prop_flat_map(|s| (Just(s), point(s))),
        psi in -6.0..6.0f64,
        chi in -1.5..1.5f64,
    ) {
        let g = GroupElement::new(psi, chi, s);
        prop_assert!(on_manifold(g.apply(u), s, 1e-9));
    }

    #[test]
    fn polar_round_trip((s, u) in sign().prop_flat_map(|s| (Just(s), point(s)))) {
        let p = polar_zw(u, s, RHO_TOL);
        if let Some((z, w)) = p.zw(s) {
            prop_assert!((z - u.z).abs() < 1e-12 * (1.0 + u.w.abs()));
            prop_assert!((w - u.w).abs() < 1e-12 * (1.0 + u.w.abs()));
        }
    }

    #[test]
    fn distance_is_symmetric(
        (s, u, v) in sign().prop_flat_map(|s| (Just(s), point(s), point(s))),
    ) {
        match (geodesic_distance(u, v, s), geodesic_distance(v, u, s)) {
            (Ok(a), Ok(b)) => prop_assert_eq!(a, b),
            (a, b) => prop_assert_eq!(a.is_err(), b.is_err()),
        }
    }

    #[test]
    fn projected_vectors_are_tangent(
        (s, q) in sign().prop_flat_map(|s| (Just(s), point(s))),
        v in prop::array::uniform4(-2.0..2.0f64),
    ) {
        let t = project_tangent(q, AmbientVector::from_array(v), s);
        prop_assert!(sdot(t, q, s).abs() < 1e-12 * (1.0 + q.euclid_norm().powi(2)));
    }

    #[test]
    fn retraction_lands_on_manifold(
        (s, q) in sign().prop_flat_map(|s| (Just(s), point(s))),
        scale in 0.5..2.0f64,
    ) {
        let r = retract(q * scale, s).unwrap();
        prop_assert!(on_manifold(r, s, 1e-12 * (1.0 + q.euclid_norm().powi(2))));
        prop_assert!(close(r, q, 1e-12));
    }

    #[test]
    fn poincare_image_inside_ball(q in h3_point()) {
        let p = poincare_ball(q);
        prop_assert!(p.iter().map(|c| c * c).sum::<f64>() < 1.0);
    }

    #[test]
    fn boost_shifts_rapidity(
        rho in 0.1..3.0f64,
        phi in -2.0..2.0f64,
        chi in -1.0..1.0f64,
    ) {
        let x = (rho * rho - 1.0).max(0.0).sqrt();
        let q = AmbientVector::new(x, 0.0, rho * phi.sinh(), rho * phi.cosh());
        let q = retract(q, Sign::Hyperbolic).unwrap();
        let before = polar_zw(q, Sign::Hyperbolic, RHO_TOL).phi.unwrap();
        let g = GroupElement::new(0.0, chi, Sign::Hyperbolic);
        let after = polar_zw(g.apply(q), Sign::Hyperbolic, RHO_TOL).phi.unwrap();
        prop_assert!((after - (before - chi)).abs() < 1e-10);
    }
}

#[test]
fn pentatope_pair_distance() {
    let a = AmbientVector::new(1.0, 0.0, 0.0, 0.0);
    let b = AmbientVector::new(-0.25, 15f64.sqrt() / 4.0, 0.0, 0.0);
    let d = geodesic_distance(a, b, Sign::Spherical).unwrap();
    assert!((d - 1.823476581936975).abs() < 1e-12);
}

#[test]
fn collisions_and_antipodes_are_singular() {
    let a = AmbientVector::new(0.0, 0.0, 0.0, 1.0);
    assert_eq!(
        geodesic_distance(a, a, Sign::Spherical),
        Err(Error::SingularPair(None))
    );
    assert_eq!(
        geodesic_distance(a, -a, Sign::Spherical),
        Err(Error::SingularPair(None))
    );
    assert_eq!(
        geodesic_distance(a, a, Sign::Hyperbolic),
        Err(Error::SingularPair(None))
    );
}

#[test]
fn projection_values() {
    let p = stereographic(AmbientVector::new(0.0, 0.0, -1.0, 0.0)).unwrap();
    assert_eq!(p, [0.0, 0.0, 0.0]);
    assert_eq!(
        stereographic(AmbientVector::new(0.0, 0.0, 1.0, 0.0)),
        Err(Error::ProjectionPole)
    );
    let q = AmbientVector::new(0.0, 0.0, 1f64.sinh(), 1f64.cosh());
    assert!((poincare_ball(q)[2] - 0.4621171572600098).abs() < 1e-15);
    let flat = retract(AmbientVector::new(0.3, -1.2, 0.0, 2.0), Sign::Hyperbolic).unwrap();
    assert_eq!(poincare_ball(flat)[2], 0.0);
}
