//! Residual-based predicates for the foliation criteria of quaternion
//! CR-submanifolds, the pointwise identities behind them, and the
//! consistency properties that tie the predicates together.
//!
//! Every predicate is the supremum of a nonnegative residual over all sample
//! points and over frame vectors plus a fixed-seed batch of random unit
//! vectors of the relevant distributions. A residual at most `tol` gives
//! `true`; up to `max(100 tol, 1e-4)` it is `inconclusive`; anything larger
//! is `false`. Quantifiers over an empty range give `not-applicable`.

mod checks;
mod curvature;
mod identities;
mod report;
mod sampling;

use std::fmt;
use std::sync::OnceLock;

use nalgebra::DVector;
use rayon::prelude::*;

use crate::ambient::AmbientSpace;
use crate::crgeom::{assess_cr, CrDecomposition, FrameJet};
use crate::error::{GeomError, Result};
use crate::fd::FdConfig;
use crate::immersion::{point_geometry, riemann, ChartedSubmanifold, PointGeometry, RiemannTensor};
use crate::quatlin;
use crate::tolerances;

pub use checks::{
    check_bundle_like, check_d_integrable, check_d_leaves_ruled, check_dperp_integrable, check_foliation_geodesic,
    check_geodesy, check_minimality, check_product, check_ruled, BundleLike, GeodesyFlags, ProductConditions,
};
pub use curvature::{check_gauss, check_leaf_gauss, check_space_form_leaf_curvature, LeafCurvature};
pub use identities::{
    bundle_like_identity, check_identities, connection_identity, d_component_identity, mu_component_identity,
    mu_perp_component_identity, IdentityResults,
};
pub use report::{verify, Property, PropertyStatus, VerificationReport};
pub use sampling::Sampler;

/// Outcome of a predicate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Inconclusive,
    NotApplicable,
}

impl Verdict {
    /// Classifies a worst-case residual against `tol`.
    pub fn from_residual(residual: f64, tol: f64) -> Verdict {
        if !residual.is_finite() {
            return Verdict::False;
        }
        if residual <= tol {
            Verdict::True
        } else if residual <= (tolerances::HYSTERESIS * tol).max(tolerances::NOISE_FLOOR) {
            Verdict::Inconclusive
        } else {
            Verdict::False
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Inconclusive => "inconclusive",
            Verdict::NotApplicable => "n/a",
        }
    }

    pub fn is_definite(self) -> bool {
        matches!(self, Verdict::True | Verdict::False)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Where a worst residual was attained.
#[derive(Debug, Clone, PartialEq)]
pub struct Witness {
    pub u: Vec<f64>,
    pub detail: String,
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let coords: Vec<String> = self.u.iter().map(|x| format!("{x:.4}")).collect();
        write!(f, "u=({})", coords.join(","))?;
        if !self.detail.is_empty() {
            write!(f, " {}", self.detail)?;
        }
        Ok(())
    }
}

/// Result of one predicate over all sample points.
#[derive(Debug, Clone, PartialEq)]
pub struct PredicateResult {
    pub name: String,
    pub verdict: Verdict,
    pub residual: f64,
    pub tol: f64,
    pub witness: Option<Witness>,
}

impl PredicateResult {
    pub fn not_applicable(name: impl Into<String>, tol: f64) -> Self {
        PredicateResult {
            name: name.into(),
            verdict: Verdict::NotApplicable,
            residual: 0.0,
            tol,
            witness: None,
        }
    }

    pub(crate) fn from_sup(name: impl Into<String>, sup: Sup, tol: f64) -> Self {
        PredicateResult {
            name: name.into(),
            verdict: Verdict::from_residual(sup.value, tol),
            residual: sup.value,
            tol,
            witness: sup.witness,
        }
    }
}

/// Running supremum of a residual with the place it was attained. NaN
/// residuals dominate everything.
#[derive(Debug, Clone, Default, PartialEq)]
pub(crate) struct Sup {
    pub value: f64,
    pub witness: Option<Witness>,
}

impl Sup {
    pub fn push(&mut self, residual: f64, u: &[f64], detail: impl FnOnce() -> String) {
        let bigger = if residual.is_nan() {
            !self.value.is_nan()
        } else {
            residual > self.value
        };
        if bigger || self.witness.is_none() {
            self.value = residual;
            self.witness = Some(Witness {
                u: u.to_vec(),
                detail: detail(),
            });
        }
    }

    /// Deterministic merge: keeps the earlier witness on ties.
    pub fn merge(mut self, other: Sup) -> Sup {
        if let Some(w) = other.witness {
            let bigger = if other.value.is_nan() {
                !self.value.is_nan()
            } else {
                other.value > self.value
            };
            if bigger || self.witness.is_none() {
                self.value = other.value;
                self.witness = Some(w);
            }
        }
        self
    }
}

/// Knobs for an analysis run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AnalysisConfig {
    pub tol: f64,
    pub identity_tol: f64,
    pub curvature_tol: f64,
    pub fd: FdConfig,
    pub random_vectors: usize,
    pub seed: u64,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            tol: tolerances::VERDICT,
            identity_tol: tolerances::IDENTITY,
            curvature_tol: tolerances::CURVATURE,
            fd: FdConfig::default(),
            random_vectors: tolerances::RANDOM_VECTORS,
            seed: 0,
        }
    }
}

/// Everything known at one sample point.
#[derive(Debug, Clone)]
pub struct PointContext {
    pub index: usize,
    pub pg: PointGeometry,
    pub dec: CrDecomposition,
    pub jet: FrameJet,
    /// Quaternionic orthonormal frame `{e, J1 e, J2 e, J3 e, ...}` of `D`.
    pub d_frame: Vec<DVector<f64>>,
    pub dperp_frame: Vec<DVector<f64>>,
    pub tangent_frame: Vec<DVector<f64>>,
    pub mu_frame: Vec<DVector<f64>>,
    pub mu_perp_frame: Vec<DVector<f64>>,
}

impl PointContext {
    pub fn u(&self) -> &[f64] {
        &self.pg.u
    }
}

/// Per-point geometry and CR structure of a scenario, computed once and
/// shared by all predicates.
#[derive(Debug, Clone)]
pub struct Analysis {
    pub sub: ChartedSubmanifold,
    pub space: AmbientSpace,
    pub config: AnalysisConfig,
    pub points: Vec<PointContext>,
    pub rank_d: usize,
    pub rank_dperp: usize,
    pub rank_mu: usize,
    riemann: OnceLock<Vec<RiemannTensor>>,
}

fn point_context(
    sub: &ChartedSubmanifold,
    space: &AmbientSpace,
    cfg: &AnalysisConfig,
    index: usize,
    u: &[f64],
) -> Result<PointContext> {
    let pg = point_geometry(sub, space, u, &cfg.fd)?;
    let dec = assess_cr(&pg, space, tolerances::CR)?;
    if !dec.is_cr {
        if dec.totally_real_residual > tolerances::CR || dec.direct_sum_sigma < tolerances::DIRECT_SUM {
            return Err(GeomError::NotTotallyReal {
                residual: dec.totally_real_residual,
                point: u.to_vec(),
            });
        }
        return Err(GeomError::NotInDistribution {
            which: "J-invariant",
            residual: dec.invariance_residual,
        });
    }
    let jet = FrameJet::at(sub, space, u, &cfg.fd, tolerances::CR)?;
    let d_frame = quatlin::quaternionic_frame(space.triple(), &dec.d)?;
    Ok(PointContext {
        index,
        dperp_frame: dec.dperp.vectors(),
        tangent_frame: dec.tangent.vectors(),
        mu_frame: dec.mu.vectors(),
        mu_perp_frame: dec.mu_perp.vectors(),
        d_frame,
        pg,
        dec,
        jet,
    })
}

impl Analysis {
    /// Computes geometry and CR structure at every sample point, in parallel.
    /// Fails if the submanifold is not CR at some point or the ranks of the
    /// distributions vary.
    pub fn new(sub: ChartedSubmanifold, space: AmbientSpace, config: AnalysisConfig) -> Result<Analysis> {
        if sub.ambient_dim() != space.dim() {
            return Err(GeomError::Shape {
                expected: space.dim(),
                got: sub.ambient_dim(),
            });
        }
        for (name, t) in [
            ("tolerance", config.tol),
            ("identity tolerance", config.identity_tol),
            ("curvature tolerance", config.curvature_tol),
        ] {
            if !(t.is_finite() && t > 0.0) {
                return Err(GeomError::Config(format!(
                    "{name} must be positive and finite, got {t}"
                )));
            }
        }
        config.fd.validate()?;
        if sub.sample_points().is_empty() {
            return Err(GeomError::Config("scenario has no sample points".into()));
        }
        sub.check_samples(&config.fd)?;
        let points: Vec<PointContext> = sub
            .sample_points()
            .par_iter()
            .enumerate()
            .map(|(i, u)| point_context(&sub, &space, &config, i, u))
            .collect::<Result<_>>()?;
        let first = &points[0].dec;
        let (rank_d, rank_dperp, rank_mu) = (first.rank_d(), first.rank_dperp(), first.mu.rank());
        for p in &points {
            for (which, expected, got) in [
                ("D", rank_d, p.dec.rank_d()),
                ("D-perp", rank_dperp, p.dec.rank_dperp()),
                ("mu", rank_mu, p.dec.mu.rank()),
            ] {
                if expected != got {
                    return Err(GeomError::NonConstantRank {
                        which,
                        expected,
                        got,
                        point: p.u().to_vec(),
                    });
                }
            }
        }
        Ok(Analysis {
            sub,
            space,
            config,
            points,
            rank_d,
            rank_dperp,
            rank_mu,
            riemann: OnceLock::new(),
        })
    }

    /// Riemann tensor of `M` at every sample point, computed on first use.
    pub fn riemann(&self) -> Result<&[RiemannTensor]> {
        if let Some(r) = self.riemann.get() {
            return Ok(r);
        }
        let r: Vec<RiemannTensor> = self
            .points
            .par_iter()
            .map(|p| riemann(&self.sub, p.u(), &self.config.fd))
            .collect::<Result<_>>()?;
        Ok(self.riemann.get_or_init(|| r))
    }

    /// Sampler for point `p`; `slot` separates independent random streams.
    pub fn sampler(&self, p: &PointContext, slot: u64) -> Sampler {
        Sampler::new(self.config.seed, p.index as u64, slot, self.config.random_vectors)
    }

    /// Supremum over all points of a per-point residual sweep, evaluated in
    /// parallel and merged in point order.
    pub(crate) fn sup<F>(&self, f: F) -> Sup
    where
        F: Fn(&PointContext, &mut Sup) + Sync,
    {
        self.try_sup(|p, s| {
            f(p, s);
            Ok(())
        })
        .expect("infallible sweep")
    }

    pub(crate) fn try_sup<F>(&self, f: F) -> Result<Sup>
    where
        F: Fn(&PointContext, &mut Sup) -> Result<()> + Sync,
    {
        let per_point: Vec<Sup> = self
            .points
            .par_iter()
            .map(|p| {
                let mut s = Sup::default();
                f(p, &mut s)?;
                Ok(s)
            })
            .collect::<Result<_>>()?;
        Ok(per_point.into_iter().fold(Sup::default(), Sup::merge))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_bands() {
        assert_eq!(Verdict::from_residual(5e-7, 1e-6), Verdict::True);
        assert_eq!(Verdict::from_residual(5e-5, 1e-6), Verdict::Inconclusive);
        assert_eq!(Verdict::from_residual(5e-3, 1e-6), Verdict::False);
        assert_eq!(Verdict::from_residual(1e-10, 1e-300), Verdict::Inconclusive);
        assert_eq!(Verdict::from_residual(f64::NAN, 1e-6), Verdict::False);
        assert_eq!(Verdict::from_residual(5e-3, 1e-4), Verdict::Inconclusive);
    }

    #[test]
    fn sup_keeps_first_maximum() {
        let mut s = Sup::default();
        s.push(0.0, &[0.0], || "a".into());
        s.push(2.0, &[1.0], || "b".into());
        s.push(2.0, &[2.0], || "c".into());
        s.push(1.0, &[3.0], || "d".into());
        assert_eq!(s.value, 2.0);
        assert_eq!(s.witness.as_ref().unwrap().detail, "b");
        let mut t = Sup::default();
        t.push(3.0, &[4.0], || "e".into());
        let m = Sup::default().merge(s.clone()).merge(t);
        assert_eq!(m.value, 3.0);
        assert_eq!(m.witness.unwrap().detail, "e");
    }
}
