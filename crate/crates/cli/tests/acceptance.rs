//! Acceptance criteria, one PASS/FAIL line each. Exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::Command;
use std::time::{Duration, Instant};

use nalgebra::{DMatrix, DVector};
use quatfol_core::ambient::{quaternion_sectional_curvature, space_form_curvature};
use quatfol_core::crgeom::{chart_bracket, FrameJet, Part};
use quatfol_core::immersion::{point_geometry, riemann};
use quatfol_core::oracle::{
    bracket_defect, bruteforce_b, bruteforce_bracket, contact_plane_fixture, jacobian_5pt, projected_field,
};
use quatfol_core::quatlin::{orthonormalize, EVEN_PERMUTATIONS};
use quatfol_core::scenarios::{builtin, builtin_names, randomized_variants};
use quatfol_core::theorems::{verify, PropertyStatus};
use quatfol_core::{
    tolerances, Alpha, AmbientSpace, AnalysisConfig, FdConfig, QuaternionTriple, ScenarioSpec, Verdict,
    VerificationReport,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LINEAR: &str = "qr-linear";
const CIRCLE: &str = "q-times-circle";
const TORUS: &str = "totally-real-torus";
const TWISTED: &str = "twisted-product";

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct Reports {
    by_name: BTreeMap<String, VerificationReport>,
    elapsed: BTreeMap<String, Duration>,
}

impl Reports {
    fn compute() -> Reports {
        let mut specs: Vec<ScenarioSpec> = builtin_names()
            .into_iter()
            .filter(|n| *n != "tilted-plane")
            .map(|n| builtin(n).unwrap())
            .collect();
        specs.extend(randomized_variants(7, 10));
        let mut by_name = BTreeMap::new();
        let mut elapsed = BTreeMap::new();
        for spec in specs {
            let start = Instant::now();
            let a = spec.analyse(spec.analysis_config(AnalysisConfig::default())).unwrap();
            let r = verify(&a, spec.declared_ranks).unwrap();
            elapsed.insert(spec.name.clone(), start.elapsed());
            by_name.insert(spec.name.clone(), r);
        }
        Reports { by_name, elapsed }
    }

    fn get(&self, name: &str) -> &VerificationReport {
        &self.by_name[name]
    }

    fn verdict(&self, scenario: &str, predicate: &str) -> Verdict {
        self.get(scenario).predicate(predicate).unwrap().verdict
    }

    fn residual(&self, scenario: &str, predicate: &str) -> f64 {
        self.get(scenario).predicate(predicate).unwrap().residual
    }

    fn equivalence_set(&self) -> Vec<&VerificationReport> {
        let mut v = vec![self.get(LINEAR), self.get(CIRCLE), self.get(TWISTED)];
        v.extend((0..10).map(|i| self.get(&format!("variant-{i:02}"))));
        v
    }
}

fn definite_agree(r: &VerificationReport, names: &[&str]) -> bool {
    let v: Vec<Verdict> = names
        .iter()
        .map(|n| r.predicate(n).unwrap().verdict)
        .filter(|v| v.is_definite())
        .collect();
    v.windows(2).all(|w| w[0] == w[1])
}

fn algebra() -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    for m in 1..=3 {
        let t = QuaternionTriple::new(m).unwrap();
        let id = DMatrix::<f64>::identity(4 * m, 4 * m);
        for a in Alpha::ALL {
            worst = worst.max((t.matrix(a) * t.matrix(a) + &id).abs().max());
        }
        for (a, b, c) in EVEN_PERMUTATIONS {
            let [a, b, c] = [a, b, c].map(|i| Alpha::new(i as usize).unwrap());
            worst = worst.max((t.matrix(a) * t.matrix(b) - t.matrix(c)).abs().max());
        }
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        worst == 0.0 && secs < 1.0,
        format!("max residual {worst:e}, {secs:.3} s"),
    )
}

fn minimality(r: &Reports) -> Outcome {
    let mut pass = true;
    let mut parts = Vec::new();
    for s in [LINEAR, CIRCLE, TWISTED] {
        let res = r.residual(s, "minimal.D");
        let t = r.elapsed[s].as_secs_f64();
        pass &= r.verdict(s, "minimal.D") == Verdict::True && res <= 1e-6 && t < 10.0;
        parts.push(format!("{s} {res:.1e} ({t:.1} s for the full report)"));
    }
    outcome(pass, parts.join(", "))
}

fn dperp_integrability(r: &Reports) -> Outcome {
    let torus = r.residual(TORUS, "integrable.D-perp");
    let (sub, y, x) = contact_plane_fixture().unwrap();
    let fd = FdConfig::default();
    let mut contact = f64::INFINITY;
    for u in sub.sample_points() {
        let flow = bracket_defect(&sub, u, &y, &x).unwrap();
        let b = chart_bracket(u, &*y, &*x, &fd).unwrap();
        let jac = jacobian_5pt(&sub, u).unwrap();
        let span = orthonormalize(4, &[&jac * y(u).unwrap(), &jac * x(u).unwrap()], 1e-10).unwrap();
        contact = contact.min(flow).min(span.residual(&(&jac * b)));
    }
    outcome(
        torus <= 1e-4 && r.verdict(TORUS, "integrable.D-perp") == Verdict::True && contact >= 0.1,
        format!("torus residual {torus:.1e}, contact-plane residual {contact:.3}"),
    )
}

const FOLIATION: [&str; 4] = [
    "foliation-geodesic.i",
    "foliation-geodesic.ii",
    "foliation-geodesic.iii",
    "foliation-geodesic.iv",
];
const RULED: [&str; 4] = ["ruled.i", "ruled.ii", "ruled.iii", "ruled.iv"];
const BUNDLE: [&str; 2] = ["bundle-like.metric", "bundle-like.sff"];

fn equivalence(r: &Reports, names: &[&str], property: &str) -> (bool, usize, usize) {
    let set = r.equivalence_set();
    let agree = set
        .iter()
        .filter(|rep| definite_agree(rep, names) && rep.property(property).unwrap().status != PropertyStatus::Fails)
        .count();
    let trues = set
        .iter()
        .filter(|rep| rep.predicate(names[0]).unwrap().verdict == Verdict::True)
        .count();
    (agree == set.len(), agree, trues)
}

fn foliation(r: &Reports) -> Outcome {
    let (ok, n, t) = equivalence(r, &FOLIATION, "foliation-geodesic-equivalence");
    outcome(ok, format!("{n}/13 scenarios agree ({t} true, {} not true)", 13 - t))
}

fn ruled(r: &Reports) -> Outcome {
    let (ok, n, _) = equivalence(r, &RULED, "ruled-equivalence");
    let s1 = RULED.iter().all(|p| r.verdict(LINEAR, p) == Verdict::True);
    let s2 = RULED.iter().all(|p| r.verdict(CIRCLE, p) == Verdict::False);
    outcome(
        ok && s1 && s2,
        format!("{n}/13 scenarios agree, {LINEAR} all true: {s1}, {CIRCLE} all false: {s2}"),
    )
}

fn bundle_like(r: &Reports) -> Outcome {
    let mut agree = 0;
    for rep in r.by_name.values() {
        if definite_agree(rep, &BUNDLE)
            && rep.property("bundle-like-agreement").unwrap().status != PropertyStatus::Fails
        {
            agree += 1;
        }
    }
    let both = [LINEAR, CIRCLE]
        .iter()
        .all(|s| BUNDLE.iter().all(|p| r.verdict(s, p) == Verdict::True));
    outcome(
        agree == r.by_name.len() && both,
        format!(
            "{agree}/{} scenarios agree, {LINEAR} and {CIRCLE} true: {both}",
            r.by_name.len()
        ),
    )
}

fn identities(r: &Reports) -> Outcome {
    let names = [
        "identity.connection",
        "identity.D-component",
        "identity.mu-perp-component",
        "identity.mu-component",
        "identity.bundle-like",
    ];
    let mut worst: f64 = 0.0;
    let mut evaluated = 0;
    for rep in r.by_name.values() {
        for n in names {
            let p = rep.predicate(n).unwrap();
            if p.verdict != Verdict::NotApplicable {
                worst = worst.max(p.residual);
                evaluated += 1;
            }
        }
    }
    outcome(
        worst <= 1e-5,
        format!("{evaluated} evaluations, max residual {worst:.1e}"),
    )
}

fn gauss(r: &Reports) -> Outcome {
    let spec = builtin("sphere").unwrap();
    let sub = spec.build().unwrap();
    let space = AmbientSpace::flat(spec.ambient_m).unwrap();
    let fd = FdConfig::default();
    let mut worst: f64 = 0.0;
    for u in sub.sample_points() {
        let pg = point_geometry(&sub, &space, u, &fd).unwrap();
        let x = pg.tangent_basis.column(0).into_owned();
        let y = pg.tangent_basis.column(1).into_owned();
        let extrinsic = pg.sff(&x, &x).dot(&pg.sff(&y, &y)) - pg.sff(&x, &y).norm_squared();
        let intrinsic = riemann(&sub, u, &fd)
            .unwrap()
            .sectional(&pg.chart_components(&x), &pg.chart_components(&y));
        worst = worst.max((extrinsic - 1.0).abs()).max((intrinsic - 1.0).abs());
    }
    let (g1, g2) = (r.residual(LINEAR, "gauss"), r.residual(CIRCLE, "gauss"));
    outcome(
        worst <= 1e-5 && g1 <= 1e-5 && g2 <= 1e-5,
        format!("sphere |K - 1| {worst:.1e}, {LINEAR} {g1:.1e}, {CIRCLE} {g2:.1e}"),
    )
}

fn curvature_tensor() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut random = |n: usize| DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
    let mut worst: f64 = 0.0;
    for c in [-4.0, 0.0, 1.0, 4.0] {
        let s = AmbientSpace::with_curvature(2, c).unwrap();
        let r = |a: &DVector<f64>, b: &DVector<f64>, cc: &DVector<f64>, d: &DVector<f64>| {
            space_form_curvature(&s, a, b, cc, d).unwrap().value
        };
        for _ in 0..100 {
            let [x, y, z, u] = [random(8), random(8), random(8), random(8)];
            let base = r(&x, &y, &z, &u);
            worst = worst
                .max((base + r(&y, &x, &z, &u)).abs())
                .max((base + r(&x, &y, &u, &z)).abs())
                .max((base - r(&z, &u, &x, &y)).abs())
                .max((base + r(&y, &z, &x, &u) + r(&z, &x, &y, &u)).abs());
            let xn = &x / x.norm();
            for a in 1..=3 {
                worst = worst.max((quaternion_sectional_curvature(&s, &xn, a).unwrap() - c).abs());
            }
            // project y off the quaternion line of x: a totally real plane
            let line: Vec<DVector<f64>> = std::iter::once(xn.clone())
                .chain(Alpha::ALL.map(|a| s.j(a, &xn)))
                .collect();
            let q = orthonormalize(8, &line, 1e-12).unwrap();
            let w = &y - q.project(&y);
            let w = &w / w.norm();
            let k = r(&xn, &w, &w, &xn);
            worst = worst.max((k - c / 4.0).abs());
        }
    }
    outcome(worst <= 1e-10, format!("max residual {worst:.1e} over 400 quadruples"))
}

fn leaf_curvature(r: &Reports) -> Outcome {
    let (dp, d) = (
        r.residual(LINEAR, "leaf-curvature.D-perp"),
        r.residual(LINEAR, "leaf-curvature.D"),
    );
    let ok = [
        r.verdict(LINEAR, "leaf-curvature.D-perp"),
        r.verdict(LINEAR, "leaf-curvature.D"),
    ] == [Verdict::True; 2];
    outcome(
        ok && dp <= 1e-5 && d <= 1e-5,
        format!("D-perp leaves {dp:.1e}, D leaves {d:.1e}"),
    )
}

fn oracle() -> Outcome {
    let fd = FdConfig::default();
    let (mut b_worst, mut bracket_worst): (f64, f64) = (0.0, 0.0);
    for name in builtin_names() {
        let spec = builtin(name).unwrap();
        let sub = spec.build().unwrap();
        let space = AmbientSpace::flat(spec.ambient_m).unwrap();
        for u in sub.sample_points() {
            let pg = point_geometry(&sub, &space, u, &fd).unwrap();
            let bf = bruteforce_b(&sub, &space, u).unwrap();
            for i in 0..sub.k() {
                for j in 0..sub.k() {
                    b_worst = b_worst.max((pg.sff_coord(i, j) - &bf.coord[i][j]).norm());
                }
            }
        }
        if spec.declared_ranks.is_none() {
            continue;
        }
        for u in sub.sample_points().iter().step_by(11).take(2) {
            let jet = FrameJet::at(&sub, &space, u, &fd, tolerances::CR).unwrap();
            let t = &jet.center.jacobian;
            let (x, z) = (t.column(0).into_owned(), t.column(sub.k() - 1).into_owned());
            let fx = projected_field(&sub, &space, Part::Tangent, x.clone(), fd);
            let fz = projected_field(&sub, &space, Part::Tangent, z.clone(), fd);
            let flow = bruteforce_bracket(&sub, u, &fx, &fz).unwrap();
            let stencil = jet.bracket(Part::Tangent, &x, Part::Tangent, &z);
            bracket_worst = bracket_worst.max((flow - stencil).norm());
        }
    }
    outcome(
        b_worst <= 1e-6 && bracket_worst <= 1e-4,
        format!("second fundamental form {b_worst:.1e}, bracket {bracket_worst:.1e}"),
    )
}

fn cli_contract() -> Outcome {
    let bin = env!("CARGO_BIN_EXE_quatfol");
    let run = |args: &[&str]| Command::new(bin).args(args).output().unwrap();
    let machine = ["--scenario", LINEAR, "--format", "machine"];
    let (a, b) = (run(&machine), run(&machine));
    let identical = a.stdout == b.stdout && !a.stdout.is_empty();
    let s1 = a.status.code();
    let wrong: PathBuf = [env!("CARGO_MANIFEST_DIR"), "..", "..", "scenarios", "wrong-ranks.scn"]
        .iter()
        .collect();
    let corrupted = run(&["--scenario", wrong.to_str().unwrap()]).status.code();
    let non_cr = run(&["--scenario", "tilted-plane"]).status.code();
    let tiny = run(&["--scenario", TWISTED, "--tol", "1e-300"]).status.code();
    let ok = identical && s1 == Some(0) && corrupted == Some(2) && non_cr == Some(2) && tiny == Some(3);
    outcome(
        ok,
        format!(
            "byte-identical: {identical}, {LINEAR} exit {s1:?}, corrupted exit {corrupted:?}, non-CR exit {non_cr:?}, tol 1e-300 exit {tiny:?}"
        ),
    )
}

fn main() {
    let start = Instant::now();
    let reports = Reports::compute();
    let results = [
        ("quaternion algebra exactness", algebra()),
        ("minimality of the quaternion distribution", minimality(&reports)),
        (
            "integrability of the totally real distribution",
            dperp_integrability(&reports),
        ),
        ("totally geodesic foliation equivalence", foliation(&reports)),
        ("totally real ruled equivalence", ruled(&reports)),
        ("bundle-like agreement", bundle_like(&reports)),
        ("identity residuals", identities(&reports)),
        ("Gauss equation", gauss(&reports)),
        ("space-form curvature tensor", curvature_tensor()),
        ("leaf curvature of the linear product", leaf_curvature(&reports)),
        ("oracle agreement", oracle()),
        ("CLI determinism and exit codes", cli_contract()),
    ];
    let mut failed = 0;
    for (i, (name, o)) in results.iter().enumerate() {
        println!(
            "{} {:>2} {name}: {}",
            if o.pass { "PASS" } else { "FAIL" },
            i + 1,
            o.detail
        );
        failed += usize::from(!o.pass);
    }
    println!(
        "acceptance: {} passed, {failed} failed in {:.1} s",
        results.len() - failed,
        start.elapsed().as_secs_f64()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
