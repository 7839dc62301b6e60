//! Intrinsic curvature checks: the Gauss equation of the immersion, and the
//! curvature of the leaves of both foliations computed on leaf sub-charts.

use nalgebra::{DMatrix, DVector};

use super::{Analysis, PointContext, PredicateResult, Sup, Verdict};
use crate::crgeom::Distribution;
use crate::error::{GeomError, Result};
use crate::immersion::{gauss_residual_at, jacobian, riemann, ChartedSubmanifold, RiemannTensor};
use crate::quatlin::Alpha;

/// Gauss equation `R = <B, B> - <B, B>` on sectional pairs of the tangent
/// frame and on random quadruples of unit tangent vectors.
pub fn check_gauss(a: &Analysis) -> Result<PredicateResult> {
    let all = a.riemann()?;
    let sup = a.try_sup(|p, s| {
        let r = &all[p.index];
        let t = &p.tangent_frame;
        for i in 0..t.len() {
            for j in i + 1..t.len() {
                let res = gauss_residual_at(&p.pg, r, &t[i], &t[j], &t[j], &t[i]);
                s.push(res, p.u(), || format!("e{i},e{j}"));
            }
        }
        let mut smp = a.sampler(p, 80);
        for q in 0..a.config.random_vectors {
            let v: Vec<DVector<f64>> = (0..4).map(|_| smp.unit_in(t)).collect();
            let res = gauss_residual_at(&p.pg, r, &v[0], &v[1], &v[2], &v[3]);
            s.push(res, p.u(), || format!("quadruple#{q}"));
        }
        Ok(())
    })?;
    Ok(PredicateResult::from_sup("gauss", sup, a.config.curvature_tol))
}

/// One result per foliation: leaves of `D⊥` and leaves of `D`.
#[derive(Debug, Clone, PartialEq)]
pub struct LeafCurvature {
    pub dperp: PredicateResult,
    pub d: PredicateResult,
}

/// Leaf through a sample point: its chart, Riemann tensor and coordinate
/// vectors in the ambient.
struct Leaf {
    chart: ChartedSubmanifold,
    riemann: RiemannTensor,
    jacobian: DMatrix<f64>,
}

impl Leaf {
    fn at(a: &Analysis, p: &PointContext, which: Distribution) -> Result<Leaf> {
        let lc = a.sub.leaf_chart(which).ok_or_else(|| {
            GeomError::Config(format!(
                "scenario '{}' has no leaf chart for {}",
                a.sub.name(),
                which.label()
            ))
        })?;
        let expected = match which {
            Distribution::D => a.rank_d,
            Distribution::Dperp => a.rank_dperp,
        };
        if lc.coords.len() != expected {
            return Err(GeomError::Config(format!(
                "leaf chart for {} has {} coordinates, distribution has rank {expected}",
                which.label(),
                lc.coords.len()
            )));
        }
        let chart = a.sub.slice(p.u(), &lc.coords)?;
        let base: Vec<f64> = lc.coords.iter().map(|&c| p.u()[c]).collect();
        let jac = jacobian(&chart, &base, &a.config.fd)?;
        let dist = p.dec.subspace(which.part());
        for col in jac.column_iter() {
            let v = col.into_owned();
            let off = dist.residual(&v) / v.norm().max(1e-300);
            if off > 1e-6 {
                return Err(GeomError::Config(format!(
                    "leaf chart for {} is not tangent to the distribution (relative residual {off:.3e})",
                    which.label()
                )));
            }
        }
        let riemann = riemann(&chart, &base, &a.config.fd)?;
        Ok(Leaf {
            chart,
            riemann,
            jacobian: jac,
        })
    }

    fn dim(&self) -> usize {
        self.chart.k()
    }

    fn coordinate(&self, i: usize) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v[i] = 1.0;
        v
    }

    /// Leaf coordinates of an ambient vector tangent to the leaf.
    fn components(&self, v: &DVector<f64>) -> DVector<f64> {
        let g = self.jacobian.transpose() * &self.jacobian;
        g.lu()
            .solve(&(self.jacobian.transpose() * v))
            .unwrap_or_else(|| DVector::zeros(self.dim()))
    }

    fn ambient(&self, c: &DVector<f64>) -> DVector<f64> {
        &self.jacobian * c
    }

    /// Leaf coordinate vectors followed by random directions.
    fn directions(&self, a: &Analysis, p: &PointContext, slot: u64) -> Vec<DVector<f64>> {
        let frame: Vec<DVector<f64>> = (0..self.dim()).map(|i| self.coordinate(i)).collect();
        a.sampler(p, slot).vectors(&frame)
    }
}

fn applicable(v: Verdict) -> bool {
    matches!(v, Verdict::True | Verdict::NotApplicable)
}

/// Intrinsic curvature of the leaves in the flat model: sectional curvature
/// `c/4` on leaves of `D⊥` and quaternion sectional curvature `c` on leaves of
/// `D`, with `c = 0`. Each part is not-applicable unless the submanifold is
/// `D`-geodesic and its `D⊥`-leaves are totally geodesic in the ambient, or
/// when the distribution is trivial. A missing leaf chart is a configuration
/// error.
pub fn check_space_form_leaf_curvature(
    a: &Analysis,
    d_geodesic: &PredicateResult,
    ruled: &PredicateResult,
) -> Result<LeafCurvature> {
    let tol = a.config.curvature_tol;
    let c = a.space.c();
    let pre = applicable(d_geodesic.verdict) && applicable(ruled.verdict);

    let dperp = if !pre || a.rank_dperp == 0 {
        PredicateResult::not_applicable("leaf-curvature.D-perp", tol)
    } else {
        let sup = a.try_sup(|p, s| {
            let leaf = Leaf::at(a, p, Distribution::Dperp)?;
            if leaf.dim() == 1 {
                s.push(leaf.riemann.max_abs(), p.u(), || "1-dimensional leaf".into());
                return Ok(());
            }
            let dirs = leaf.directions(a, p, 90);
            for (i, x) in dirs.iter().enumerate() {
                for (j, y) in dirs.iter().enumerate().skip(i + 1) {
                    let area = {
                        let g = leaf.riemann.metric();
                        let (gxx, gyy, gxy) = (
                            (x.transpose() * g * x)[0],
                            (y.transpose() * g * y)[0],
                            (x.transpose() * g * y)[0],
                        );
                        gxx * gyy - gxy * gxy
                    };
                    if area < 1e-8 {
                        continue;
                    }
                    let k = leaf.riemann.sectional(x, y);
                    s.push((k - c / 4.0).abs(), p.u(), || format!("leaf dirs {i},{j}"));
                }
            }
            Ok(())
        })?;
        PredicateResult::from_sup("leaf-curvature.D-perp", sup, tol)
    };

    let d = if !pre || a.rank_d == 0 {
        PredicateResult::not_applicable("leaf-curvature.D", tol)
    } else {
        let sup = a.try_sup(|p, s| {
            let leaf = Leaf::at(a, p, Distribution::D)?;
            for (i, x) in leaf.directions(a, p, 91).iter().enumerate() {
                let xa = leaf.ambient(x);
                for alpha in Alpha::ALL {
                    let y = leaf.components(&a.space.j(alpha, &xa));
                    let k = leaf.riemann.sectional(x, &y);
                    s.push((k - c).abs(), p.u(), || format!("leaf dir {i} J{}", alpha.index()));
                }
            }
            Ok(())
        })?;
        PredicateResult::from_sup("leaf-curvature.D", sup, tol)
    };
    Ok(LeafCurvature { dperp, d })
}

/// Agreement of the curvature of `M` with the intrinsic curvature of a leaf,
/// `|R(X,Y,Z,U) - R^L(X,Y,Z,U)|` for leaf vectors, wherever the leaves are
/// totally geodesic in `M`: for `D⊥` when its foliation is totally geodesic
/// (or `D = 0`), for `D` when its leaves are totally geodesic in the ambient.
pub fn check_leaf_gauss(
    a: &Analysis,
    dperp_foliation_geodesic: &PredicateResult,
    d_leaves_ruled: &PredicateResult,
) -> Result<LeafCurvature> {
    let tol = a.config.curvature_tol;
    let run = |which: Distribution, name: &str| -> Result<PredicateResult> {
        let all = a.riemann()?;
        let sup = a.try_sup(|p, s| {
            let leaf = Leaf::at(a, p, which)?;
            let r = &all[p.index];
            let dirs: Vec<DVector<f64>> = (0..leaf.dim()).map(|i| leaf.coordinate(i)).collect();
            let in_m: Vec<DVector<f64>> = dirs.iter().map(|c| p.pg.chart_components(&leaf.ambient(c))).collect();
            let n = dirs.len();
            let push = |idx: [usize; 4], s: &mut Sup| {
                let on_leaf = leaf
                    .riemann
                    .eval(&dirs[idx[0]], &dirs[idx[1]], &dirs[idx[2]], &dirs[idx[3]]);
                let on_m = r.eval(&in_m[idx[0]], &in_m[idx[1]], &in_m[idx[2]], &in_m[idx[3]]);
                s.push((on_m - on_leaf).abs(), p.u(), || format!("leaf coords {idx:?}"));
            };
            for i in 0..n {
                for j in 0..n {
                    for k in 0..n {
                        for l in 0..n {
                            push([i, j, k, l], s);
                        }
                    }
                }
            }
            Ok(())
        })?;
        Ok(PredicateResult::from_sup(name, sup, tol))
    };
    let dperp = if a.rank_dperp >= 2 && (a.rank_d == 0 || dperp_foliation_geodesic.verdict == Verdict::True) {
        run(Distribution::Dperp, "leaf-gauss.D-perp")?
    } else {
        PredicateResult::not_applicable("leaf-gauss.D-perp", tol)
    };
    let d = if a.rank_d >= 4 && d_leaves_ruled.verdict == Verdict::True {
        run(Distribution::D, "leaf-gauss.D")?
    } else {
        PredicateResult::not_applicable("leaf-gauss.D", tol)
    };
    Ok(LeafCurvature { dperp, d })
}
