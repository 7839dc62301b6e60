use std::collections::HashMap;
use std::sync::OnceLock;

use quatfol_core::scenarios::{builtin, randomized_variants};
use quatfol_core::theorems::{verify, PropertyStatus};
use quatfol_core::{AnalysisConfig, ScenarioSpec, Verdict, VerificationReport};

use Verdict::{False, NotApplicable as NA, True};

const LIN: &str = "qr-linear";
const CIRCLE: &str = "q-times-circle";
const TWISTED: &str = "twisted-product";

fn run(spec: &ScenarioSpec) -> VerificationReport {
    let a = spec.analyse(spec.analysis_config(AnalysisConfig::default())).unwrap();
    verify(&a, spec.declared_ranks).unwrap()
}

/// Reports are expensive; every test in this file shares one computation.
fn reports() -> &'static HashMap<String, VerificationReport> {
    static CELL: OnceLock<HashMap<String, VerificationReport>> = OnceLock::new();
    CELL.get_or_init(|| {
        let mut specs: Vec<ScenarioSpec> = [LIN, CIRCLE, TWISTED, "totally-real-torus", "totally-real-flat"]
            .iter()
            .map(|n| builtin(n).unwrap())
            .collect();
        specs.extend(randomized_variants(7, 10));
        specs.iter().map(|s| (s.name.clone(), run(s))).collect()
    })
}

fn report(name: &str) -> &'static VerificationReport {
    &reports()[name]
}

fn verdicts(r: &VerificationReport, names: &[&str]) -> Vec<Verdict> {
    names
        .iter()
        .map(|n| r.predicate(n).unwrap_or_else(|| panic!("{n}")).verdict)
        .collect()
}

const GEODESY: [&str; 4] = ["geodesy.D", "geodesy.D-perp", "geodesy.mixed", "geodesy.total"];
const FOLIATION: [&str; 4] = [
    "foliation-geodesic.i",
    "foliation-geodesic.ii",
    "foliation-geodesic.iii",
    "foliation-geodesic.iv",
];
const RULED: [&str; 4] = ["ruled.i", "ruled.ii", "ruled.iii", "ruled.iv"];
const BUNDLE: [&str; 2] = ["bundle-like.metric", "bundle-like.sff"];
// the first two product conditions are the geodesy of D and D-perp
const PRODUCT: [&str; 3] = ["geodesy.D", "geodesy.D-perp", "product.iii"];
const IDENTITIES: [&str; 5] = [
    "identity.connection",
    "identity.D-component",
    "identity.mu-perp-component",
    "identity.mu-component",
    "identity.bundle-like",
];

fn equivalence_set() -> Vec<&'static VerificationReport> {
    let mut v = vec![report(LIN), report(CIRCLE), report(TWISTED)];
    v.extend((0..10).map(|i| report(&format!("variant-{i:02}"))));
    v
}

fn assert_no_definite_disagreement(r: &VerificationReport, names: &[&str]) {
    let definite: Vec<Verdict> = verdicts(r, names).into_iter().filter(|v| v.is_definite()).collect();
    assert!(
        definite.windows(2).all(|w| w[0] == w[1]),
        "{}: {names:?} -> {definite:?}",
        r.scenario
    );
}

#[test]
fn linear_product_is_totally_geodesic_everywhere() {
    let r = report(LIN);
    assert_eq!(r.ranks, Some((4, 1, 0)));
    assert_eq!(verdicts(r, &GEODESY), [True; 4]);
    assert_eq!(verdicts(r, &FOLIATION), [True; 4]);
    assert_eq!(verdicts(r, &RULED), [True; 4]);
    assert_eq!(verdicts(r, &BUNDLE), [True; 2]);
    assert_eq!(verdicts(r, &PRODUCT), [True; 3]);
    assert_eq!(verdicts(r, &["integrable.D", "integrable.D-perp"]), [True, NA]);
    for name in IDENTITIES {
        assert!(r.predicate(name).unwrap().residual <= 1e-9, "{name}");
    }
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn quaternion_line_times_circle() {
    let r = report(CIRCLE);
    assert_eq!(r.ranks, Some((4, 1, 0)));
    assert_eq!(verdicts(r, &GEODESY), [True, False, True, False]);
    assert_eq!(verdicts(r, &FOLIATION), [True; 4]);
    assert_eq!(verdicts(r, &RULED), [False; 4]);
    assert_eq!(verdicts(r, &BUNDLE), [True; 2]);
    assert_eq!(verdicts(r, &PRODUCT), [True, False, True]);
    // rank one is always integrable
    assert_eq!(verdicts(r, &["integrable.D-perp", "integrable.D"]), [NA, True]);
    // mu = 0: the product conditions hold exactly when M is totally geodesic
    assert_eq!(
        r.property("mu-zero-product-iff-totally-geodesic").unwrap().status,
        PropertyStatus::Holds
    );
    assert_eq!(r.exit_code(), 0);
}

#[test]
fn twisted_product_d_integrability_tracks_d_geodesy() {
    let r = report(TWISTED);
    let [d_int, d_geo] = [r.predicate("integrable.D").unwrap(), r.predicate("geodesy.D").unwrap()];
    assert_eq!(d_int.verdict, d_geo.verdict);
    assert_eq!(
        r.property("d-integrable-iff-d-geodesic").unwrap().status,
        PropertyStatus::Holds
    );
}

#[test]
fn totally_real_surfaces() {
    let torus = report("totally-real-torus");
    assert_eq!(torus.ranks.map(|r| (r.0, r.1)), Some((0, 2)));
    assert_eq!(torus.predicate("integrable.D-perp").unwrap().verdict, True);
    assert_eq!(verdicts(torus, &FOLIATION), [NA; 4]);
    assert_eq!(verdicts(torus, &RULED), [False; 4]);
    let flat = report("totally-real-flat");
    assert_eq!(verdicts(flat, &RULED), [True; 4]);
}

#[test]
fn foliation_geodesic_criteria_are_equivalent() {
    let mut seen = Vec::new();
    for r in equivalence_set() {
        assert_no_definite_disagreement(r, &FOLIATION);
        assert_ne!(
            r.property("foliation-geodesic-equivalence").unwrap().status,
            PropertyStatus::Fails
        );
        seen.push(r.predicate(FOLIATION[0]).unwrap().verdict);
    }
    assert!(seen.contains(&True) && seen.contains(&False), "{seen:?}");
}

#[test]
fn ruled_criteria_are_equivalent() {
    for r in equivalence_set() {
        assert_no_definite_disagreement(r, &RULED);
        assert_ne!(r.property("ruled-equivalence").unwrap().status, PropertyStatus::Fails);
    }
    assert_eq!(verdicts(report(LIN), &RULED), [True; 4]);
    assert_eq!(verdicts(report(CIRCLE), &RULED), [False; 4]);
}

#[test]
fn bundle_like_forms_agree() {
    for r in equivalence_set() {
        assert_no_definite_disagreement(r, &BUNDLE);
        assert_ne!(
            r.property("bundle-like-agreement").unwrap().status,
            PropertyStatus::Fails
        );
    }
}

#[test]
fn identities_hold_everywhere() {
    for r in reports().values() {
        for name in IDENTITIES {
            let p = r.predicate(name).unwrap();
            assert!(
                p.verdict == NA || p.residual <= 1e-5,
                "{} {name}: {:e}",
                r.scenario,
                p.residual
            );
        }
    }
}

#[test]
fn quaternion_distribution_is_minimal() {
    for name in [LIN, CIRCLE, TWISTED] {
        let p = report(name).predicate("minimal.D").unwrap();
        assert_eq!(p.verdict, True, "{name}");
        assert!(p.residual <= 1e-6, "{name}: {:e}", p.residual);
    }
}

#[test]
fn gauss_equation_on_products() {
    for name in [LIN, CIRCLE, TWISTED] {
        let p = report(name).predicate("gauss").unwrap();
        assert!(p.residual <= 1e-5, "{name}: {:e}", p.residual);
    }
}

#[test]
fn flat_leaves_of_the_linear_product() {
    let r = report(LIN);
    for name in ["leaf-curvature.D-perp", "leaf-curvature.D"] {
        let p = r.predicate(name).unwrap();
        assert_eq!(p.verdict, True, "{name}");
        assert!(p.residual <= 1e-5);
    }
}

#[test]
fn no_property_fails_on_catalog_or_variants() {
    for r in reports().values() {
        for p in &r.properties {
            assert_ne!(p.status, PropertyStatus::Fails, "{}: {}", r.scenario, p.name);
        }
    }
}
