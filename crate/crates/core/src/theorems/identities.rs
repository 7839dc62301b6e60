//! Pointwise identities relating the induced connection, the second
//! fundamental form and the normal connection along the CR splitting.

use std::cell::RefCell;
use std::collections::HashMap;

use nalgebra::{DMatrix, DVector};

use super::checks::{d_of, dperp_of, mu_of, tangent_of};
use super::{Analysis, PointContext, PredicateResult};
use crate::ambient::AmbientSpace;
use crate::crgeom::{LocalFrame, Part};
use crate::error::Result;
use crate::immersion::normal_connection;
use crate::quatlin::Alpha;
use crate::tolerances;

/// `|<J_α ∇_X Z, Y> + <B(X, Y), J_α Z>|` for `X, Z ∈ D⊥`, `Y ∈ D`.
pub fn connection_identity(
    space: &AmbientSpace,
    p: &PointContext,
    alpha: Alpha,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
) -> f64 {
    let nabla = p.dec.tangent.project(&p.jet.flat_derivative(x, Part::Dperp, z));
    (space.j(alpha, &nabla).dot(y) + p.pg.sff(x, y).dot(&space.j(alpha, z))).abs()
}

/// `|<∇_X Z, U> + <B(X, J_α U), J_α Z>|` for `X ∈ TM`, `Z ∈ D⊥`, `U ∈ D`.
pub fn d_component_identity(
    space: &AmbientSpace,
    p: &PointContext,
    alpha: Alpha,
    x: &DVector<f64>,
    z: &DVector<f64>,
    u: &DVector<f64>,
) -> f64 {
    let lhs = p.jet.flat_derivative(x, Part::Dperp, z).dot(u);
    (lhs + p.pg.sff(x, &space.j(alpha, u)).dot(&space.j(alpha, z))).abs()
}

/// `|<∇̄_X Z, J_α W> - <B(X, Z), J_α W>|` for `X ∈ TM`, `Z, W ∈ D⊥`.
pub fn mu_perp_component_identity(
    space: &AmbientSpace,
    p: &PointContext,
    alpha: Alpha,
    x: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
) -> f64 {
    let jw = space.j(alpha, w);
    (p.jet.flat_derivative(x, Part::Dperp, z).dot(&jw) - p.pg.sff(x, z).dot(&jw)).abs()
}

/// `|<∇̄_U X, V> + <∇̄_V X, U> + <B(U, J_α V) + B(V, J_α U), J_α X>|` for
/// `X ∈ D⊥`, `U, V ∈ D`.
pub fn bundle_like_identity(
    space: &AmbientSpace,
    p: &PointContext,
    alpha: Alpha,
    x: &DVector<f64>,
    u: &DVector<f64>,
    v: &DVector<f64>,
) -> f64 {
    let metric = p.jet.flat_derivative(u, Part::Dperp, x).dot(v) + p.jet.flat_derivative(v, Part::Dperp, x).dot(u);
    let s = p.pg.sff(u, &space.j(alpha, v)) + p.pg.sff(v, &space.j(alpha, u));
    (metric + s.dot(&space.j(alpha, x))).abs()
}

/// `∇⊥_{∂_i} (J_α Z̃_b)` for every frame vector `z_b` of `D⊥` and every chart
/// direction `i`, from an independent finite difference of the normal field.
struct NormalJet {
    /// `[b][i]`.
    values: Vec<Vec<DVector<f64>>>,
}

impl NormalJet {
    /// Jets for all three structures; the projector of `D⊥` at each stencil
    /// point is computed once and shared.
    fn all(a: &Analysis, p: &PointContext) -> Result<[NormalJet; 3]> {
        let fd = &a.config.fd;
        let cache: RefCell<HashMap<Vec<u64>, DMatrix<f64>>> = RefCell::default();
        let projector = |q: &[f64]| -> Result<DMatrix<f64>> {
            let key: Vec<u64> = q.iter().map(|x| x.to_bits()).collect();
            if let Some(m) = cache.borrow().get(&key) {
                return Ok(m.clone());
            }
            let lf = LocalFrame::at(&a.sub, &a.space, q, fd, tolerances::CR)?;
            let m = lf.projector(Part::Dperp).clone();
            cache.borrow_mut().insert(key, m.clone());
            Ok(m)
        };
        let one = |alpha: Alpha| -> Result<NormalJet> {
            let mut values = Vec::with_capacity(p.dperp_frame.len());
            for z in &p.dperp_frame {
                let field = |q: &[f64]| -> Result<DVector<f64>> { Ok(a.space.j(alpha, &(projector(q)? * z))) };
                let row = (0..a.sub.k())
                    .map(|i| normal_connection(&a.sub, &a.space, p.u(), &field, i, fd).map(|d| d.normal_part))
                    .collect::<Result<Vec<_>>>()?;
                values.push(row);
            }
            Ok(NormalJet { values })
        };
        Ok([one(Alpha::ONE)?, one(Alpha::TWO)?, one(Alpha::THREE)?])
    }

    /// `∇⊥_X (J_α Z̃)` by linearity in `X` (chart components) and `Z`.
    fn apply(&self, p: &PointContext, x: &DVector<f64>, z: &DVector<f64>) -> DVector<f64> {
        let xc = p.pg.chart_components(x);
        let mut out = DVector::zeros(x.len());
        for (b, zb) in p.dperp_frame.iter().enumerate() {
            let c = zb.dot(z);
            for (i, v) in self.values[b].iter().enumerate() {
                out.axpy(c * xc[i], v, 1.0);
            }
        }
        out
    }
}

/// `|<∇̄_X Z, N> - <∇⊥_X (J_α Z), J_α N>|` for `X ∈ TM`, `Z ∈ D⊥`, `N ∈ μ`,
/// with the normal connection differentiated independently of `B`.
pub fn mu_component_identity(
    a: &Analysis,
    p: &PointContext,
    alpha: Alpha,
    x: &DVector<f64>,
    z: &DVector<f64>,
    n: &DVector<f64>,
) -> Result<f64> {
    let jets = NormalJet::all(a, p)?;
    Ok(mu_component_with(a, p, &jets[alpha.index() - 1], alpha, x, z, n))
}

fn mu_component_with(
    a: &Analysis,
    p: &PointContext,
    jet: &NormalJet,
    alpha: Alpha,
    x: &DVector<f64>,
    z: &DVector<f64>,
    n: &DVector<f64>,
) -> f64 {
    let lhs = p.jet.flat_derivative(x, Part::Dperp, z).dot(n);
    (lhs - jet.apply(p, x, z).dot(&a.space.j(alpha, n))).abs()
}

/// Worst residual of each identity over sampled admissible tuples.
#[derive(Debug, Clone, PartialEq)]
pub struct IdentityResults {
    pub connection: PredicateResult,
    pub d_component: PredicateResult,
    pub mu_perp_component: PredicateResult,
    pub mu_component: PredicateResult,
    pub bundle_like: PredicateResult,
}

impl IdentityResults {
    pub fn all(&self) -> [&PredicateResult; 5] {
        [
            &self.connection,
            &self.d_component,
            &self.mu_perp_component,
            &self.mu_component,
            &self.bundle_like,
        ]
    }
}

type Frames = fn(&PointContext) -> &[DVector<f64>];

fn identity(
    a: &Analysis,
    name: &str,
    applicable: bool,
    slot: u64,
    frames: [Frames; 3],
    f: impl Fn(&PointContext, Alpha, &[DVector<f64>]) -> f64 + Sync,
) -> PredicateResult {
    let tol = a.config.identity_tol;
    if !applicable {
        return PredicateResult::not_applicable(name, tol);
    }
    let sup = a.sup(|p, s| {
        let fs: Vec<&[DVector<f64>]> = frames.iter().map(|g| g(p)).collect();
        let tuples = a.sampler(p, slot).tuples(&fs);
        for (i, t) in tuples.iter().enumerate() {
            for alpha in Alpha::ALL {
                s.push(f(p, alpha, t), p.u(), || format!("tuple#{i} J{}", alpha.index()));
            }
        }
    });
    PredicateResult::from_sup(name, sup, tol)
}

/// Evaluates every identity. Only the normal-connection identity can fail to
/// evaluate (its field must stay normal across the stencil).
pub fn check_identities(a: &Analysis) -> Result<IdentityResults> {
    let sp = &a.space;
    let has_d = a.rank_d >= 4;
    let has_dp = a.rank_dperp >= 1;
    let connection = identity(
        a,
        "identity.connection",
        has_d && has_dp,
        70,
        [dperp_of, d_of, dperp_of],
        |p, al, t| connection_identity(sp, p, al, &t[0], &t[1], &t[2]),
    );
    let d_component = identity(
        a,
        "identity.D-component",
        has_d && has_dp,
        71,
        [tangent_of, dperp_of, d_of],
        |p, al, t| d_component_identity(sp, p, al, &t[0], &t[1], &t[2]),
    );
    let mu_perp_component = identity(
        a,
        "identity.mu-perp-component",
        has_dp,
        72,
        [tangent_of, dperp_of, dperp_of],
        |p, al, t| mu_perp_component_identity(sp, p, al, &t[0], &t[1], &t[2]),
    );
    let bundle_like = identity(
        a,
        "identity.bundle-like",
        has_d && has_dp,
        73,
        [dperp_of, d_of, d_of],
        |p, al, t| bundle_like_identity(sp, p, al, &t[0], &t[1], &t[2]),
    );

    let name = "identity.mu-component";
    let tol = a.config.identity_tol;
    let mu_component = if !has_dp || a.rank_mu == 0 {
        PredicateResult::not_applicable(name, tol)
    } else {
        let sup = a.try_sup(|p, s| {
            let frames: [&[DVector<f64>]; 3] = [tangent_of(p), dperp_of(p), mu_of(p)];
            let tuples = a.sampler(p, 74).tuples(&frames);
            let jets = NormalJet::all(a, p)?;
            for (alpha, jet) in Alpha::ALL.into_iter().zip(&jets) {
                for (i, t) in tuples.iter().enumerate() {
                    let r = mu_component_with(a, p, jet, alpha, &t[0], &t[1], &t[2]);
                    s.push(r, p.u(), || format!("tuple#{i} J{}", alpha.index()));
                }
            }
            Ok(())
        })?;
        PredicateResult::from_sup(name, sup, tol)
    };
    Ok(IdentityResults {
        connection,
        d_component,
        mu_perp_component,
        mu_component,
        bundle_like,
    })
}
