use std::fmt::Write as _;

use super::{
    check_bundle_like, check_d_integrable, check_d_leaves_ruled, check_dperp_integrable, check_foliation_geodesic,
    check_gauss, check_geodesy, check_identities, check_leaf_gauss, check_minimality, check_product, check_ruled,
    check_space_form_leaf_curvature, Analysis, LeafCurvature, PredicateResult, Verdict,
};
use crate::error::{GeomError, Result};

/// Status of a consistency property between predicates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PropertyStatus {
    Holds,
    Fails,
    Inconclusive,
    NotApplicable,
}

impl PropertyStatus {
    pub fn label(self) -> &'static str {
        match self {
            PropertyStatus::Holds => "holds",
            PropertyStatus::Fails => "fails",
            PropertyStatus::Inconclusive => "inconclusive",
            PropertyStatus::NotApplicable => "n/a",
        }
    }

    fn of(v: Verdict) -> PropertyStatus {
        match v {
            Verdict::True => PropertyStatus::Holds,
            Verdict::False => PropertyStatus::Fails,
            Verdict::Inconclusive => PropertyStatus::Inconclusive,
            Verdict::NotApplicable => PropertyStatus::NotApplicable,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Property {
    pub name: String,
    pub status: PropertyStatus,
    pub description: String,
}

impl Property {
    fn new(name: &str, status: PropertyStatus, description: impl Into<String>) -> Self {
        Property {
            name: name.into(),
            status,
            description: description.into(),
        }
    }
}

/// Combined verdict of a list that must all be true: false dominates, then
/// inconclusive; all-n/a stays n/a.
fn conjunction(vs: &[Verdict]) -> Verdict {
    if vs.contains(&Verdict::False) {
        Verdict::False
    } else if vs.contains(&Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else if vs.iter().all(|v| *v == Verdict::NotApplicable) {
        Verdict::NotApplicable
    } else {
        Verdict::True
    }
}

/// All applicable definite verdicts equal. Definite disagreement fails even
/// in the presence of inconclusive entries.
fn agreement(vs: &[Verdict]) -> PropertyStatus {
    let definite: Vec<Verdict> = vs.iter().copied().filter(|v| v.is_definite()).collect();
    if definite.windows(2).any(|w| w[0] != w[1]) {
        PropertyStatus::Fails
    } else if vs.contains(&Verdict::Inconclusive) {
        PropertyStatus::Inconclusive
    } else if definite.is_empty() {
        PropertyStatus::NotApplicable
    } else {
        PropertyStatus::Holds
    }
}

fn implication(a: Verdict, b: Verdict) -> PropertyStatus {
    match (a, b) {
        (Verdict::NotApplicable, _) => PropertyStatus::NotApplicable,
        (Verdict::False, _) => PropertyStatus::Holds,
        (_, Verdict::True) => PropertyStatus::Holds,
        (Verdict::Inconclusive, _) => PropertyStatus::Inconclusive,
        (Verdict::True, b) => PropertyStatus::of(b),
    }
}

/// One-line summary of a group of verdicts that should coincide.
fn equivalence_summary(results: &[&PredicateResult]) -> String {
    let vs: Vec<Verdict> = results.iter().map(|r| r.verdict).collect();
    let applicable: Vec<Verdict> = vs.iter().copied().filter(|v| *v != Verdict::NotApplicable).collect();
    if applicable.is_empty() {
        return "n/a".into();
    }
    if applicable.iter().all(|v| *v == applicable[0]) {
        return format!("EQUIVALENT ({}/{} {})", applicable.len(), vs.len(), applicable[0]);
    }
    let count = |t: Verdict| vs.iter().filter(|v| **v == t).count();
    format!(
        "NOT EQUIVALENT ({} true, {} false, {} inconclusive)",
        count(Verdict::True),
        count(Verdict::False),
        count(Verdict::Inconclusive)
    )
}

const PRODUCT_NOTE: &str = "note: the product conditions are reported as conditions, not as a product decomposition; \
a flat Riemannian product such as a quaternion factor times a circle splits locally into a quaternion and a \
totally real factor, yet fails condition ii because the circle bends in the ambient space";

/// Everything a run produced: predicate results, the consistency
/// properties linking them, and human-readable summary lines.
#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport {
    pub scenario: String,
    /// Computed `(rank D, rank D⊥, rank μ)`; absent when the submanifold is not CR.
    pub ranks: Option<(usize, usize, usize)>,
    pub declared_ranks: Option<(usize, usize)>,
    pub predicates: Vec<PredicateResult>,
    pub properties: Vec<Property>,
    pub summary: Vec<String>,
    pub notes: Vec<String>,
}

impl VerificationReport {
    /// Report for a submanifold that is not CR at some sample point, or whose
    /// distributions change rank. Returns `None` for errors that are not such
    /// findings.
    pub fn not_cr(scenario: &str, declared_ranks: Option<(usize, usize)>, err: &GeomError) -> Option<Self> {
        let finding = match err {
            GeomError::NotTotallyReal { .. }
            | GeomError::NotInDistribution { .. }
            | GeomError::NonConstantRank { .. } => err.to_string(),
            _ => return None,
        };
        Some(VerificationReport {
            scenario: scenario.into(),
            ranks: None,
            declared_ranks,
            predicates: Vec::new(),
            properties: vec![Property::new(
                "cr-structure",
                PropertyStatus::Fails,
                format!("not a quaternion CR-submanifold: {finding}"),
            )],
            summary: vec!["CR structure: not a quaternion CR-submanifold".into()],
            notes: vec![finding],
        })
    }

    pub fn predicate(&self, name: &str) -> Option<&PredicateResult> {
        self.predicates.iter().find(|p| p.name == name)
    }

    pub fn property(&self, name: &str) -> Option<&Property> {
        self.properties.iter().find(|p| p.name == name)
    }

    /// 2 if a property fails, else 3 if anything is inconclusive, else 0.
    pub fn exit_code(&self) -> i32 {
        if self.properties.iter().any(|p| p.status == PropertyStatus::Fails) {
            2
        } else if self.properties.iter().any(|p| p.status == PropertyStatus::Inconclusive)
            || self.predicates.iter().any(|p| p.verdict == Verdict::Inconclusive)
        {
            3
        } else {
            0
        }
    }

    /// Tab-separated records `name verdict residual witness`, predicates
    /// first, then properties with a `property:` prefix.
    pub fn to_machine(&self) -> String {
        let mut out = String::new();
        for p in &self.predicates {
            let witness = p.witness.as_ref().map_or("-".to_string(), |w| w.to_string());
            let _ = writeln!(out, "{}\t{}\t{:.6e}\t{}", p.name, p.verdict, p.residual, witness);
        }
        for p in &self.properties {
            let _ = writeln!(out, "property:{}\t{}\t-\t-", p.name, p.status.label());
        }
        out
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "scenario: {}", self.scenario);
        match self.ranks {
            Some((d, dp, mu)) => {
                let _ = writeln!(out, "ranks: D = {d}, D-perp = {dp}, mu = {mu}");
            }
            None => {
                let _ = writeln!(out, "ranks: undefined");
            }
        }
        if let Some((d, dp)) = self.declared_ranks {
            let _ = writeln!(out, "declared ranks: D = {d}, D-perp = {dp}");
        }
        let _ = writeln!(out);
        for line in &self.summary {
            let _ = writeln!(out, "{line}");
        }
        if !self.predicates.is_empty() {
            let _ = writeln!(out, "\npredicates:");
            let width = self.predicates.iter().map(|p| p.name.len()).max().unwrap_or(0);
            for p in &self.predicates {
                let witness = p.witness.as_ref().map_or(String::new(), |w| format!("  at {w}"));
                let _ = writeln!(
                    out,
                    "  {:width$}  {:12}  residual {:.3e} (tol {:.1e}){witness}",
                    p.name,
                    p.verdict.label(),
                    p.residual,
                    p.tol
                );
            }
        }
        let _ = writeln!(out, "\nproperties:");
        for p in &self.properties {
            let _ = writeln!(out, "  [{}] {}: {}", p.status.label(), p.name, p.description);
        }
        if !self.notes.is_empty() {
            let _ = writeln!(out);
            for n in &self.notes {
                let _ = writeln!(out, "{n}");
            }
        }
        let _ = writeln!(out, "\nexit code: {}", self.exit_code());
        out
    }
}

/// Runs every predicate on an analysed scenario and assembles the report.
pub fn verify(a: &Analysis, declared_ranks: Option<(usize, usize)>) -> Result<VerificationReport> {
    let mut notes = Vec::new();
    let geodesy = check_geodesy(a);
    let dperp_int = check_dperp_integrable(a);
    let d_int = check_d_integrable(a);
    let fol = check_foliation_geodesic(a);
    let ruled = check_ruled(a);
    let bundle = check_bundle_like(a);
    let product = check_product(a, &geodesy);
    let minimal = check_minimality(a);
    let d_leaves = check_d_leaves_ruled(a);
    let identities = check_identities(a)?;
    let gauss = check_gauss(a)?;

    let tol = a.config.curvature_tol;
    let leaf_or_na = |r: Result<LeafCurvature>, prefix: &str, notes: &mut Vec<String>| match r {
        Ok(l) => Ok(l),
        Err(GeomError::Config(msg)) => {
            notes.push(format!("{prefix}: not evaluated ({msg})"));
            Ok(LeafCurvature {
                dperp: PredicateResult::not_applicable(format!("{prefix}.D-perp"), tol),
                d: PredicateResult::not_applicable(format!("{prefix}.D"), tol),
            })
        }
        Err(e) => Err(e),
    };
    let leaf_curv = leaf_or_na(
        check_space_form_leaf_curvature(a, &geodesy.d_geodesic, &ruled[0]),
        "leaf-curvature",
        &mut notes,
    )?;
    let leaf_gauss = leaf_or_na(check_leaf_gauss(a, &fol[0], &d_leaves), "leaf-gauss", &mut notes)?;

    let v = |r: &PredicateResult| r.verdict;
    let fol_v: Vec<Verdict> = fol.iter().map(v).collect();
    let ruled_v: Vec<Verdict> = ruled.iter().map(v).collect();
    let mu_zero = a.rank_mu == 0;

    let mut properties = Vec::new();
    let cr_status = match declared_ranks {
        Some(dr) if dr != (a.rank_d, a.rank_dperp) => PropertyStatus::Fails,
        _ => PropertyStatus::Holds,
    };
    properties.push(Property::new(
        "cr-structure",
        cr_status,
        match declared_ranks {
            Some((d, dp)) => format!(
                "quaternion CR-submanifold with computed ranks ({}, {}), declared ({d}, {dp})",
                a.rank_d, a.rank_dperp
            ),
            None => format!("quaternion CR-submanifold with ranks ({}, {})", a.rank_d, a.rank_dperp),
        },
    ));
    properties.push(Property::new(
        "dperp-integrable",
        PropertyStatus::of(dperp_int.verdict),
        "the totally real distribution is integrable",
    ));
    properties.push(Property::new(
        "d-integrable-iff-d-geodesic",
        agreement(&[d_int.verdict, geodesy.d_geodesic.verdict]),
        "D is integrable exactly when M is D-geodesic",
    ));
    properties.push(Property::new(
        "foliation-geodesic-equivalence",
        agreement(&fol_v),
        "the four characterisations of a totally geodesic totally real foliation agree",
    ));
    properties.push(Property::new(
        "mixed-implies-foliation-geodesic",
        implication(geodesy.mixed_geodesic.verdict, conjunction(&fol_v)),
        "mixed geodesic implies a totally geodesic totally real foliation",
    ));
    properties.push(Property::new(
        "mu-zero-mixed-iff-foliation-geodesic",
        if mu_zero {
            let mut all = fol_v.clone();
            all.push(geodesy.mixed_geodesic.verdict);
            agreement(&all)
        } else {
            PropertyStatus::NotApplicable
        },
        "with mu = 0, mixed geodesic exactly when the totally real foliation is totally geodesic",
    ));
    properties.push(Property::new(
        "ruled-equivalence",
        agreement(&ruled_v),
        "the four characterisations of totally real ruledness agree",
    ));
    properties.push(Property::new(
        "totally-geodesic-implies-ruled",
        implication(geodesy.totally_geodesic.verdict, conjunction(&ruled_v)),
        "a totally geodesic submanifold is totally real ruled",
    ));
    properties.push(Property::new(
        "totally-geodesic-implies-ruled-both",
        implication(
            geodesy.totally_geodesic.verdict,
            conjunction(&[d_leaves.verdict, ruled[0].verdict]),
        ),
        "a totally geodesic submanifold is ruled with respect to both foliations",
    ));
    properties.push(Property::new(
        "bundle-like-agreement",
        agreement(&[bundle.metric.verdict, bundle.sff.verdict]),
        "metric and second-fundamental-form tests for a bundle-like metric agree",
    ));
    properties.push(Property::new(
        "totally-geodesic-implies-product-conditions",
        implication(geodesy.totally_geodesic.verdict, product.combined),
        "a totally geodesic submanifold satisfies the three product conditions",
    ));
    properties.push(Property::new(
        "mu-zero-product-iff-totally-geodesic",
        if mu_zero {
            agreement(&[product.combined, geodesy.totally_geodesic.verdict])
        } else {
            PropertyStatus::NotApplicable
        },
        "with mu = 0, the product conditions hold exactly when M is totally geodesic",
    ));
    properties.push(Property::new(
        "d-minimal",
        PropertyStatus::of(minimal.verdict),
        "the quaternion distribution is minimal",
    ));
    for r in identities.all() {
        properties.push(Property::new(
            &r.name,
            PropertyStatus::of(r.verdict),
            "pointwise identity",
        ));
    }
    properties.push(Property::new(
        "gauss",
        PropertyStatus::of(gauss.verdict),
        "Gauss equation in the flat ambient",
    ));
    for (r, what) in [
        (&leaf_curv.dperp, "leaves of D-perp have curvature c/4"),
        (&leaf_curv.d, "leaves of D have quaternion sectional curvature c"),
        (
            &leaf_gauss.dperp,
            "curvature of M restricted to D-perp leaves is the leaf curvature",
        ),
        (
            &leaf_gauss.d,
            "curvature of M restricted to D leaves is the leaf curvature",
        ),
    ] {
        properties.push(Property::new(&r.name, PropertyStatus::of(r.verdict), what));
    }

    let [pi, pii, piii] = &product.conditions;
    let combined = match product.combined {
        Verdict::True => "hold",
        Verdict::False => "fail",
        Verdict::Inconclusive => "inconclusive",
        Verdict::NotApplicable => "n/a",
    };
    let summary = vec![
        format!("D-geodesic: {}", geodesy.d_geodesic.verdict),
        format!("D-perp-geodesic: {}", geodesy.dperp_geodesic.verdict),
        format!("mixed geodesic: {}", geodesy.mixed_geodesic.verdict),
        format!("totally geodesic: {}", geodesy.totally_geodesic.verdict),
        format!("D-perp integrable: {}", dperp_int.verdict),
        format!("D integrable: {}", d_int.verdict),
        format!(
            "totally geodesic foliation: {}",
            equivalence_summary(&fol.iter().collect::<Vec<_>>())
        ),
        format!("ruled: {}", equivalence_summary(&ruled.iter().collect::<Vec<_>>())),
        format!("bundle-like: {}", equivalence_summary(&[&bundle.metric, &bundle.sff])),
        format!(
            "product conditions: i {}, ii {}, iii {}; conditions {combined}",
            pi.verdict, pii.verdict, piii.verdict
        ),
        format!("D minimal: {}", minimal.verdict),
    ];
    notes.push(PRODUCT_NOTE.into());

    let mut predicates = vec![
        geodesy.d_geodesic,
        geodesy.dperp_geodesic,
        geodesy.mixed_geodesic,
        geodesy.totally_geodesic,
        dperp_int,
        d_int,
    ];
    predicates.extend(fol);
    predicates.extend(ruled);
    predicates.push(d_leaves);
    predicates.push(bundle.metric);
    predicates.push(bundle.sff);
    predicates.push(piii.clone());
    predicates.push(minimal);
    predicates.extend(identities.all().into_iter().cloned());
    predicates.push(gauss);
    predicates.extend([leaf_curv.dperp, leaf_curv.d, leaf_gauss.dperp, leaf_gauss.d]);

    Ok(VerificationReport {
        scenario: a.sub.name().to_string(),
        ranks: Some((a.rank_d, a.rank_dperp, a.rank_mu)),
        declared_ranks,
        predicates,
        properties,
        summary,
        notes,
    })
}
