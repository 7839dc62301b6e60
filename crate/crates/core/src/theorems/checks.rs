use nalgebra::DVector;

use super::{Analysis, PointContext, PredicateResult, Sup};
use crate::crgeom::Part;
use crate::immersion::PointGeometry;
use crate::quatlin::Alpha;

type FrameOf = fn(&PointContext) -> &[DVector<f64>];

pub(crate) fn d_of(p: &PointContext) -> &[DVector<f64>] {
    &p.d_frame
}
pub(crate) fn dperp_of(p: &PointContext) -> &[DVector<f64>] {
    &p.dperp_frame
}
pub(crate) fn tangent_of(p: &PointContext) -> &[DVector<f64>] {
    &p.tangent_frame
}
pub(crate) fn mu_of(p: &PointContext) -> &[DVector<f64>] {
    &p.mu_frame
}
pub(crate) fn mu_perp_of(p: &PointContext) -> &[DVector<f64>] {
    &p.mu_perp_frame
}

/// `A_N X = Σ_b <B(X, t_b), N> t_b` over the orthonormal tangent basis.
pub(crate) fn shape_apply(pg: &PointGeometry, n: &DVector<f64>, x: &DVector<f64>) -> DVector<f64> {
    let mut out = DVector::zeros(x.len());
    for t in pg.tangent_basis.column_iter() {
        let t = t.into_owned();
        out.axpy(pg.sff(x, &t).dot(n), &t, 1.0);
    }
    out
}

/// Supremum of `f` over sampled tuples drawn from `frames`.
fn sweep(a: &Analysis, slot: u64, frames: &[FrameOf], f: impl Fn(&PointContext, &[DVector<f64>]) -> f64 + Sync) -> Sup {
    a.sup(|p, s| {
        let fs: Vec<&[DVector<f64>]> = frames.iter().map(|g| g(p)).collect();
        let mut smp = a.sampler(p, slot);
        for (i, t) in smp.tuples(&fs).iter().enumerate() {
            let r = f(p, t);
            s.push(r, p.u(), || format!("tuple#{i}"));
        }
    })
}

fn predicate(
    a: &Analysis,
    name: &str,
    applicable: bool,
    slot: u64,
    frames: &[FrameOf],
    f: impl Fn(&PointContext, &[DVector<f64>]) -> f64 + Sync,
) -> PredicateResult {
    if !applicable {
        return PredicateResult::not_applicable(name, a.config.tol);
    }
    PredicateResult::from_sup(name, sweep(a, slot, frames, f), a.config.tol)
}

/// Vanishing of `B` on `D×D`, `D⊥×D⊥`, `D×D⊥` and `TM×TM`.
#[derive(Debug, Clone, PartialEq)]
pub struct GeodesyFlags {
    pub d_geodesic: PredicateResult,
    pub dperp_geodesic: PredicateResult,
    pub mixed_geodesic: PredicateResult,
    pub totally_geodesic: PredicateResult,
}

pub fn check_geodesy(a: &Analysis) -> GeodesyFlags {
    let sff = |p: &PointContext, t: &[DVector<f64>]| p.pg.sff(&t[0], &t[1]).norm();
    GeodesyFlags {
        d_geodesic: predicate(a, "geodesy.D", a.rank_d > 0, 1, &[d_of, d_of], sff),
        dperp_geodesic: predicate(a, "geodesy.D-perp", a.rank_dperp > 0, 2, &[dperp_of, dperp_of], sff),
        mixed_geodesic: predicate(
            a,
            "geodesy.mixed",
            a.rank_d > 0 && a.rank_dperp > 0,
            3,
            &[d_of, dperp_of],
            sff,
        ),
        totally_geodesic: predicate(a, "geodesy.total", true, 4, &[tangent_of, tangent_of], sff),
    }
}

/// Bracket closure of `D⊥`: `|Q [X, Z]|` for projected extensions of
/// `X, Z ∈ D⊥`.
pub fn check_dperp_integrable(a: &Analysis) -> PredicateResult {
    predicate(
        a,
        "integrable.D-perp",
        a.rank_dperp >= 2,
        5,
        &[dperp_of, dperp_of],
        |p, t| {
            let br = p.jet.bracket(Part::Dperp, &t[0], Part::Dperp, &t[1]);
            p.dec.d.project(&br).norm()
        },
    )
}

/// Bracket closure of `D`: `|Q⊥ [X, Y]|` for `X, Y ∈ D`.
pub fn check_d_integrable(a: &Analysis) -> PredicateResult {
    predicate(a, "integrable.D", a.rank_d >= 4, 6, &[d_of, d_of], |p, t| {
        let br = p.jet.bracket(Part::D, &t[0], Part::D, &t[1]);
        p.dec.dperp.project(&br).norm()
    })
}

/// The four equivalent conditions for the totally real foliation to be
/// totally geodesic.
pub fn check_foliation_geodesic(a: &Analysis) -> [PredicateResult; 4] {
    let ok = a.rank_d >= 4 && a.rank_dperp >= 1;
    [
        predicate(a, "foliation-geodesic.i", ok, 10, &[dperp_of, dperp_of], |p, t| {
            p.dec
                .d
                .project(&p.jet.flat_derivative(&t[0], Part::Dperp, &t[1]))
                .norm()
        }),
        predicate(a, "foliation-geodesic.ii", ok, 11, &[d_of, dperp_of], |p, t| {
            p.dec.mu_perp.project(&p.pg.sff(&t[0], &t[1])).norm()
        }),
        predicate(a, "foliation-geodesic.iii", ok, 12, &[dperp_of, mu_perp_of], |p, t| {
            p.dec.d.project(&shape_apply(&p.pg, &t[1], &t[0])).norm()
        }),
        predicate(a, "foliation-geodesic.iv", ok, 13, &[d_of, mu_perp_of], |p, t| {
            p.dec.dperp.project(&shape_apply(&p.pg, &t[1], &t[0])).norm()
        }),
    ]
}

/// The four equivalent conditions for the leaves of `D⊥` to be totally
/// geodesic in the ambient space.
pub fn check_ruled(a: &Analysis) -> [PredicateResult; 4] {
    let ok = a.rank_dperp >= 1;
    let tol = a.config.tol;
    let sup2 = |name: &str, x: Sup, y: Sup| {
        if !ok {
            return PredicateResult::not_applicable(name, tol);
        }
        PredicateResult::from_sup(name, x.merge(y), tol)
    };
    let geodesic_dperp = |slot| sweep(a, slot, &[dperp_of, dperp_of], |p, t| p.pg.sff(&t[0], &t[1]).norm());
    let mixed_mu = |slot| {
        if a.rank_d == 0 {
            return Sup::default();
        }
        sweep(a, slot, &[d_of, dperp_of], |p, t| {
            p.dec.mu_perp.project(&p.pg.sff(&t[0], &t[1])).norm()
        })
    };

    let i = {
        let s = sweep(a, 20, &[dperp_of, dperp_of], |p, t| {
            let b = p.pg.sff(&t[0], &t[1]).norm();
            let h = p
                .dec
                .d
                .project(&p.jet.flat_derivative(&t[0], Part::Dperp, &t[1]))
                .norm();
            b.max(h)
        });
        sup2("ruled.i", s, Sup::default())
    };
    let ii = sup2("ruled.ii", geodesic_dperp(21), mixed_mu(22));
    let iii = {
        let parallel = sweep(a, 23, &[dperp_of, dperp_of], |p, t| {
            let flat = p.jet.flat_derivative(&t[0], Part::Dperp, &t[1]);
            Alpha::ALL
                .iter()
                .map(|&al| p.dec.mu.project(&a.space.j(al, &flat)).norm())
                .fold(0.0, f64::max)
        });
        let values = sweep(a, 24, &[dperp_of, tangent_of], |p, t| {
            p.dec.mu_perp.project(&p.pg.sff(&t[0], &t[1])).norm()
        });
        sup2("ruled.iii", parallel, values)
    };
    let iv = {
        let killed = sweep(a, 25, &[dperp_of, dperp_of], |p, t| {
            Alpha::ALL
                .iter()
                .map(|&al| shape_apply(&p.pg, &a.space.j(al, &t[1]), &t[0]).norm())
                .fold(0.0, f64::max)
        });
        let into_d = if a.rank_mu == 0 {
            Sup::default()
        } else {
            sweep(a, 26, &[dperp_of, mu_of], |p, t| {
                p.dec.dperp.project(&shape_apply(&p.pg, &t[1], &t[0])).norm()
            })
        };
        sup2("ruled.iv", killed, into_d)
    };
    [i, ii, iii, iv]
}

/// Bundle-like test by the metric route and by the second-fundamental-form route.
#[derive(Debug, Clone, PartialEq)]
pub struct BundleLike {
    pub metric: PredicateResult,
    pub sff: PredicateResult,
}

pub fn check_bundle_like(a: &Analysis) -> BundleLike {
    let ok = a.rank_d >= 4 && a.rank_dperp >= 1;
    BundleLike {
        metric: predicate(a, "bundle-like.metric", ok, 30, &[dperp_of, d_of, d_of], |p, t| {
            let (x, u, v) = (&t[0], &t[1], &t[2]);
            let a1 = p.jet.flat_derivative(u, Part::Dperp, x).dot(v);
            let a2 = p.jet.flat_derivative(v, Part::Dperp, x).dot(u);
            (a1 + a2).abs()
        }),
        sff: predicate(a, "bundle-like.sff", ok, 31, &[d_of, d_of], |p, t| {
            let (u, v) = (&t[0], &t[1]);
            Alpha::ALL
                .iter()
                .map(|&al| {
                    let s = p.pg.sff(u, &a.space.j(al, v)) + p.pg.sff(v, &a.space.j(al, u));
                    p.dec.dperp.project(&a.space.j(al, &s)).norm()
                })
                .fold(0.0, f64::max)
        }),
    }
}

/// The three product conditions and their conjunction.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductConditions {
    pub conditions: [PredicateResult; 3],
    pub combined: super::Verdict,
}

pub fn check_product(a: &Analysis, geodesy: &GeodesyFlags) -> ProductConditions {
    use super::Verdict;
    let mut i = geodesy.d_geodesic.clone();
    i.name = "product.i".into();
    let mut ii = geodesy.dperp_geodesic.clone();
    ii.name = "product.ii".into();
    let iii = predicate(
        a,
        "product.iii",
        a.rank_d > 0 && a.rank_dperp > 0,
        40,
        &[dperp_of, d_of],
        |p, t| p.dec.mu_perp.project(&p.pg.sff(&t[0], &t[1])).norm(),
    );
    let vs = [i.verdict, ii.verdict, iii.verdict];
    let combined = if vs.contains(&Verdict::False) {
        Verdict::False
    } else if vs.contains(&Verdict::Inconclusive) {
        Verdict::Inconclusive
    } else if vs.iter().all(|v| *v == Verdict::NotApplicable) {
        Verdict::NotApplicable
    } else {
        Verdict::True
    };
    ProductConditions {
        conditions: [i, ii, iii],
        combined,
    }
}

/// Trace of the second fundamental form `h` of `D` over quaternionic frames
/// `{e, J1 e, J2 e, J3 e}`, paired with unit vectors of `D⊥`.
pub fn check_minimality(a: &Analysis) -> PredicateResult {
    let name = "minimal.D";
    if a.rank_d < 4 || a.rank_dperp < 1 {
        return PredicateResult::not_applicable(name, a.config.tol);
    }
    let sup = a.sup(|p, s| {
        let h = |v: &DVector<f64>| p.dec.dperp.project(&p.jet.flat_derivative(v, Part::D, v));
        let trace = |frame: &[DVector<f64>]| {
            frame
                .iter()
                .fold(DVector::zeros(a.space.dim()), |acc: DVector<f64>, v| acc + h(v))
        };
        let mut smp = a.sampler(p, 50);
        let mut traces = vec![trace(&p.d_frame)];
        if a.rank_d == 4 {
            for _ in 0..a.config.random_vectors {
                let e = smp.unit_in(&p.d_frame);
                let quad: Vec<DVector<f64>> = std::iter::once(e.clone())
                    .chain(Alpha::ALL.iter().map(|&al| a.space.j(al, &e)))
                    .collect();
                traces.push(trace(&quad));
            }
        }
        let us = smp.vectors(&p.dperp_frame);
        for (fi, tr) in traces.iter().enumerate() {
            for (ui, u) in us.iter().enumerate() {
                s.push(tr.dot(u).abs(), p.u(), || format!("frame#{fi} U#{ui}"));
            }
        }
    });
    PredicateResult::from_sup(name, sup, a.config.tol)
}

/// Leaves of `D` totally geodesic in the ambient space: `|(I - Q) ∇̄_X Ỹ|`
/// for `X, Y ∈ D`.
pub fn check_d_leaves_ruled(a: &Analysis) -> PredicateResult {
    predicate(a, "ruled.D-leaves", a.rank_d >= 4, 60, &[d_of, d_of], |p, t| {
        let flat = p.jet.flat_derivative(&t[0], Part::D, &t[1]);
        (&flat - p.dec.d.project(&flat)).norm()
    })
}
