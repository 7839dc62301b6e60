use quatfol_core::crgeom::{assess_cr, extract_cr, project, LocalFrame, Part};
use quatfol_core::immersion::point_geometry;
use quatfol_core::scenarios::{builtin, builtin_names};
use quatfol_core::{tolerances, Alpha, AmbientSpace, Distribution, FdConfig, GeomError};

fn setup(
    name: &str,
) -> (
    quatfol_core::ScenarioSpec,
    quatfol_core::ChartedSubmanifold,
    AmbientSpace,
) {
    let spec = builtin(name).unwrap();
    let sub = spec.build().unwrap();
    let space = AmbientSpace::flat(spec.ambient_m).unwrap();
    (spec, sub, space)
}

#[test]
fn computed_ranks_match_the_catalog() {
    let fd = FdConfig::default();
    for name in builtin_names() {
        let (spec, sub, space) = setup(name);
        let Some((d, dp)) = spec.declared_ranks else {
            continue;
        };
        for u in sub.sample_points() {
            let pg = point_geometry(&sub, &space, u, &fd).unwrap();
            let dec = extract_cr(&pg, &space, tolerances::CR).unwrap();
            assert_eq!((dec.rank_d(), dec.rank_dperp()), (d, dp), "{name} at {u:?}");
            let n = space.dim() - sub.k();
            assert_eq!(dec.mu.rank() + dec.mu_perp.rank(), n, "{name}");
            assert_eq!(dec.mu_perp.rank(), 3 * dp, "{name}");
        }
    }
}

#[test]
fn quaternion_line_times_circle_normal_splitting() {
    let (_, sub, space) = setup("q-times-circle");
    let pg = point_geometry(&sub, &space, &sub.sample_points()[0], &FdConfig::default()).unwrap();
    let dec = extract_cr(&pg, &space, tolerances::CR).unwrap();
    assert_eq!(
        (dec.rank_d(), dec.rank_dperp(), dec.mu_perp.rank(), dec.mu.rank()),
        (4, 1, 3, 0)
    );
}

#[test]
fn tilted_plane_is_rejected() {
    let (spec, sub, space) = setup("tilted-plane");
    assert!(spec.declared_ranks.is_none());
    let pg = point_geometry(&sub, &space, &sub.sample_points()[0], &FdConfig::default()).unwrap();
    let dec = assess_cr(&pg, &space, tolerances::CR).unwrap();
    assert!(!dec.is_cr);
    assert!(dec.totally_real_residual > 0.1);
    assert!(matches!(
        extract_cr(&pg, &space, tolerances::CR),
        Err(GeomError::NotTotallyReal { .. })
    ));
}

#[test]
fn structural_invariants_of_the_splitting() {
    let fd = FdConfig::default();
    for name in [
        "qr-linear",
        "q-times-circle",
        "twisted-product",
        "twisted-graph-wide",
        "totally-real-torus",
    ] {
        let (_, sub, space) = setup(name);
        for u in sub.sample_points().iter().step_by(7) {
            let pg = point_geometry(&sub, &space, u, &fd).unwrap();
            let dec = extract_cr(&pg, &space, tolerances::CR).unwrap();
            assert!(dec.direct_sum_sigma >= 0.1, "{name}");
            for alpha in Alpha::ALL {
                for v in dec.d.vectors() {
                    assert!(
                        dec.d.residual(&space.j(alpha, &v)) < 1e-9,
                        "J-invariance of D on {name}"
                    );
                }
                for w in dec.dperp.vectors() {
                    let jw = space.j(alpha, &w);
                    assert!(dec.normal.residual(&jw) < 1e-9, "J D-perp normal on {name}");
                    assert!(dec.mu_perp.residual(&jw) < 1e-9, "J D-perp in mu-perp on {name}");
                }
                for n in dec.mu.vectors() {
                    assert!(
                        dec.mu.residual(&space.j(alpha, &n)) < 1e-9,
                        "J-invariance of mu on {name}"
                    );
                }
            }
            // a tangent vector splits orthogonally
            let t = pg.tangent_basis.column_sum() / (sub.k() as f64).sqrt();
            let q = project(&dec, &t, Distribution::D).unwrap();
            let qp = project(&dec, &t, Distribution::Dperp).unwrap();
            assert!((q.norm_squared() + qp.norm_squared() - t.norm_squared()).abs() < 1e-9);
            let n = pg.normal_basis.column(0).into_owned();
            assert!(matches!(
                project(&dec, &n, Distribution::D),
                Err(GeomError::NotTangent(_))
            ));
        }
    }
}

#[test]
fn local_frame_projectors_match_the_decomposition() {
    let (_, sub, space) = setup("twisted-graph");
    let fd = FdConfig::default();
    let u = &sub.sample_points()[3];
    let pg = point_geometry(&sub, &space, u, &fd).unwrap();
    let dec = extract_cr(&pg, &space, tolerances::CR).unwrap();
    let lf = LocalFrame::at(&sub, &space, u, &fd, tolerances::CR).unwrap();
    for part in Part::ALL {
        let diff = lf.projector(part) - dec.subspace(part).projector();
        assert!(diff.norm() < 1e-9, "{part:?}");
    }
}
