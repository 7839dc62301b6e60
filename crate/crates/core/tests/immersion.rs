use std::sync::Arc;

use nalgebra::DVector;
use proptest::prelude::*;
use quatfol_core::immersion::{
    gauss_equation_residual, jacobian, point_geometry, riemann, shape_operator, ChartedSubmanifold,
};
use quatfol_core::scenarios::{builtin, parse_scenario, ChartSpec};
use quatfol_core::{AmbientSpace, FdConfig, GeomError};

fn built(name: &str) -> (ChartedSubmanifold, AmbientSpace) {
    let spec = builtin(name).unwrap();
    (spec.build().unwrap(), AmbientSpace::flat(spec.ambient_m).unwrap())
}

fn circle_of_radius(r: f64) -> (ChartedSubmanifold, AmbientSpace) {
    let mut spec = builtin("circle").unwrap();
    spec.chart = ChartSpec::Builtin {
        family: "circle".into(),
        params: vec![r],
    };
    (spec.build().unwrap(), AmbientSpace::flat(2).unwrap())
}

#[test]
fn plane_is_flat_and_unbent() {
    let (sub, space) = built("plane");
    let fd = FdConfig::default();
    for u in sub.sample_points() {
        let pg = point_geometry(&sub, &space, u, &fd).unwrap();
        assert!(pg.sff.iter().all(|b| b.norm() < 1e-9));
        assert!(pg.christoffel.max_abs() < 1e-9);
    }
}

#[test]
fn circle_curvature_is_inward_and_one_over_r() {
    let fd = FdConfig::default();
    for r in [1.0, 2.0] {
        let (sub, space) = circle_of_radius(r);
        for u in sub.sample_points() {
            let pg = point_geometry(&sub, &space, u, &fd).unwrap();
            let t = pg.tangent_basis.column(0).into_owned();
            let b = pg.sff(&t, &t);
            let expected = -&pg.position / (r * r);
            assert!((b - expected).norm() < 1e-8, "r = {r}, u = {u:?}");
        }
    }
}

#[test]
fn sphere_second_fundamental_form_and_gauss_equation() {
    let (sub, space) = built("sphere");
    let fd = FdConfig::default();
    for u in sub.sample_points() {
        let pg = point_geometry(&sub, &space, u, &fd).unwrap();
        let x = pg.tangent_basis.column(0).into_owned();
        let y = pg.tangent_basis.column(1).into_owned();
        let w = (&x + &y) / 2f64.sqrt();
        for v in [&x, &y, &w] {
            assert!((pg.sff(v, v).norm() - 1.0).abs() < 1e-8);
        }
        let extrinsic = pg.sff(&x, &x).dot(&pg.sff(&y, &y)) - pg.sff(&x, &y).norm_squared();
        let r = riemann(&sub, u, &fd).unwrap();
        let intrinsic = r.sectional(&pg.chart_components(&x), &pg.chart_components(&y));
        assert!((extrinsic - 1.0).abs() < 1e-5);
        assert!((intrinsic - 1.0).abs() < 1e-5, "K = {intrinsic} at {u:?}");
        let res = gauss_equation_residual(&sub, &space, u, &x, &y, &y, &x, &fd).unwrap();
        assert!(res < 1e-5);
        // the unit outer normal gives the identity shape operator up to sign
        let n = pg.position.clone();
        let a = shape_operator(&pg, &n).unwrap();
        assert!((a.matrix.abs() - nalgebra::DMatrix::identity(2, 2)).norm() < 1e-7);
        assert!(a.asymmetry() < 1e-9);
    }
}

#[test]
fn q_times_circle_second_fundamental_form() {
    // B vanishes except on the circle direction, where it is inward radial
    // in the second factor.
    let (sub, space) = built("q-times-circle");
    let fd = FdConfig::default();
    let u = [0.1, -0.2, 0.3, 0.0, 0.4];
    let pg = point_geometry(&sub, &space, &u, &fd).unwrap();
    let mut expected = DVector::zeros(8);
    expected[4] = -u[4].cos();
    expected[5] = -u[4].sin();
    for i in 0..5 {
        for j in 0..5 {
            let want = if i == 4 && j == 4 {
                expected.clone()
            } else {
                DVector::zeros(8)
            };
            assert!((pg.sff_coord(i, j) - want).norm() < 1e-8, "B({i},{j})");
        }
    }
}

#[test]
fn polynomial_chart_jacobian_matches_linear_coefficients() {
    let spec = parse_scenario(
        "name = poly\nambient_m = 1\n[chart]\nkind = polynomial\nk = 2\n\
         term = 0, 2.0, 1, 0\nterm = 1, -1.5, 0, 1\nterm = 2, 3.0, 2, 0\nterm = 3, 0.5, 1, 1\n",
    )
    .unwrap();
    let sub = spec.build().unwrap();
    let j = jacobian(&sub, &[0.0, 0.0], &FdConfig::default()).unwrap();
    let expected = nalgebra::DMatrix::from_row_slice(4, 2, &[2.0, 0.0, 0.0, -1.5, 0.0, 0.0, 0.0, 0.0]);
    assert!((j - expected).norm() < 1e-12);
}

#[test]
fn margin_violations_are_reported() {
    let (sub, space) = built("sphere");
    let err = point_geometry(&sub, &space, &[0.999, 0.0], &FdConfig::default()).unwrap_err();
    assert!(matches!(err, GeomError::Margin { .. }));
}

fn scaled_sphere(scale: f64) -> ChartedSubmanifold {
    let base = builtin("sphere").unwrap().chart_fn().unwrap();
    ChartedSubmanifold::new(
        "scaled",
        3,
        vec![(-1.0 / scale, 1.0 / scale); 2],
        Arc::new(move |u: &[f64]| base(&[scale * u[0], scale * u[1]])),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn second_fundamental_form_is_chart_scale_invariant(
        a in -0.6f64..0.6, b in -0.6f64..0.6, angle in 0.0f64..std::f64::consts::TAU,
    ) {
        let space = AmbientSpace::flat(3).unwrap();
        let fd = FdConfig::default();
        let one = scaled_sphere(1.0);
        let two = scaled_sphere(2.0);
        let p1 = point_geometry(&one, &space, &[a, b], &fd).unwrap();
        let p2 = point_geometry(&two, &space, &[a / 2.0, b / 2.0], &fd).unwrap();
        let x = p1.tangent_basis.column(0) * angle.cos() + p1.tangent_basis.column(1) * angle.sin();
        let x = x.into_owned();
        prop_assert!((p1.sff(&x, &x).norm() - p2.sff(&x, &x).norm()).abs() < 1e-7);
        prop_assert!((p1.sff(&x, &x) - p2.sff(&x, &x)).norm() < 1e-7);
    }

    #[test]
    fn second_fundamental_form_is_normal_and_symmetric(
        u in prop::collection::vec(-0.7f64..0.7, 5),
    ) {
        let (sub, space) = built("twisted-graph");
        let pg = point_geometry(&sub, &space, &u, &FdConfig::default()).unwrap();
        for i in 0..5 {
            for j in 0..5 {
                let b = pg.sff_coord(i, j);
                prop_assert!(pg.normal_residual(&b) < 1e-12);
                prop_assert!((b - pg.sff_coord(j, i)).norm() < 1e-9);
            }
        }
    }
}
