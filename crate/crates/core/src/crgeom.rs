//! The CR structure of a submanifold: the quaternionic distribution `D`, the
//! totally real distribution `D⊥`, the normal splitting `μ ⊕ μ⊥` with
//! `μ⊥ = J1 D⊥ ⊕ J2 D⊥ ⊕ J3 D⊥`, and first-order jets of all the
//! corresponding orthogonal projectors.
//!
//! `D` is computed, never declared: it is the largest J-invariant subspace of
//! the tangent space, `T ∩ J1 T ∩ J2 T ∩ J3 T`.
//!
//! Vectors are extended to local fields by projecting the constant ambient
//! vector onto the distribution at nearby points, `Z̃(u') = P(u') Z`. Every
//! quantity built from such extensions below is tensorial, so the choice of
//! extension does not affect it.

use nalgebra::{DMatrix, DVector};

use crate::ambient::AmbientSpace;
use crate::error::{GeomError, Result};
use crate::fd::FdConfig;
use crate::immersion::{jacobian, ChartedSubmanifold, PointGeometry, StencilSamples};
use crate::quatlin::{self, Alpha, Subspace};
use crate::tolerances;

/// One of the two tangent distributions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Distribution {
    D,
    Dperp,
}

impl Distribution {
    pub fn label(self) -> &'static str {
        match self {
            Distribution::D => "D",
            Distribution::Dperp => "D-perp",
        }
    }

    pub fn complement(self) -> Distribution {
        match self {
            Distribution::D => Distribution::Dperp,
            Distribution::Dperp => Distribution::D,
        }
    }

    pub fn part(self) -> Part {
        match self {
            Distribution::D => Part::D,
            Distribution::Dperp => Part::Dperp,
        }
    }
}

/// Index into the six projector fields carried by a [`LocalFrame`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Part {
    Tangent,
    Normal,
    D,
    Dperp,
    MuPerp,
    Mu,
}

impl Part {
    pub const ALL: [Part; 6] = [
        Part::Tangent,
        Part::Normal,
        Part::D,
        Part::Dperp,
        Part::MuPerp,
        Part::Mu,
    ];

    fn index(self) -> usize {
        match self {
            Part::Tangent => 0,
            Part::Normal => 1,
            Part::D => 2,
            Part::Dperp => 3,
            Part::MuPerp => 4,
            Part::Mu => 5,
        }
    }
}

/// Pointwise CR decomposition `T = D ⊕ D⊥`, `T⊥ = μ ⊕ μ⊥`.
#[derive(Debug, Clone)]
pub struct CrDecomposition {
    pub tangent: Subspace,
    pub normal: Subspace,
    pub d: Subspace,
    pub dperp: Subspace,
    pub mu_perp: Subspace,
    pub mu: Subspace,
    /// Largest `|(I - P_D) J_a d|` over a basis of `D`.
    pub invariance_residual: f64,
    /// Largest `|P_T J_a w|` over a basis of `D⊥`.
    pub totally_real_residual: f64,
    /// Smallest singular value of the stacked `J_a w`.
    pub direct_sum_sigma: f64,
    pub is_cr: bool,
}

impl CrDecomposition {
    pub fn rank_d(&self) -> usize {
        self.d.rank()
    }

    pub fn rank_dperp(&self) -> usize {
        self.dperp.rank()
    }

    pub fn subspace(&self, part: Part) -> &Subspace {
        match part {
            Part::Tangent => &self.tangent,
            Part::Normal => &self.normal,
            Part::D => &self.d,
            Part::Dperp => &self.dperp,
            Part::MuPerp => &self.mu_perp,
            Part::Mu => &self.mu,
        }
    }
}

/// Splits a tangent space given by an orthonormal basis.
fn decompose(tangent_basis: &DMatrix<f64>, space: &AmbientSpace, tol: f64) -> Result<CrDecomposition> {
    let n = space.dim();
    if tangent_basis.nrows() != n {
        return Err(GeomError::Shape {
            expected: n,
            got: tangent_basis.nrows(),
        });
    }
    let tangent = Subspace::from_orthonormal(tangent_basis.clone(), tol)?;
    let identity = Subspace::from_orthonormal(DMatrix::identity(n, n), tol)?;
    let normal = tangent.complement_within(&identity, 0.5)?;

    let mut d = tangent.clone();
    for alpha in Alpha::ALL {
        let jt = quatlin::apply_j(space.triple(), alpha.index(), &tangent)?;
        d = quatlin::intersect(&d, &jt, tolerances::INTERSECTION)?;
    }
    if !d.rank().is_multiple_of(4) {
        return Err(GeomError::NonQuaternionic(d.rank()));
    }
    let dperp = d.complement_within(&tangent, 0.5)?;

    let mut invariance_residual: f64 = 0.0;
    for v in d.vectors() {
        for alpha in Alpha::ALL {
            invariance_residual = invariance_residual.max(d.residual(&space.j(alpha, &v)));
        }
    }
    let mut totally_real_residual: f64 = 0.0;
    let mut images = Vec::new();
    for w in dperp.vectors() {
        for alpha in Alpha::ALL {
            let jw = space.j(alpha, &w);
            totally_real_residual = totally_real_residual.max(tangent.project(&jw).norm());
            images.push(jw);
        }
    }
    let direct_sum_sigma = if images.is_empty() {
        1.0
    } else {
        DMatrix::from_columns(&images).singular_values().min()
    };
    let mu_perp = quatlin::orthonormalize(n, &images, 0.5)?;
    let mu = mu_perp.complement_within(&normal, 0.5)?;
    let is_cr =
        invariance_residual <= tol && totally_real_residual <= tol && direct_sum_sigma >= tolerances::DIRECT_SUM;
    Ok(CrDecomposition {
        tangent,
        normal,
        d,
        dperp,
        mu_perp,
        mu,
        invariance_residual,
        totally_real_residual,
        direct_sum_sigma,
        is_cr,
    })
}

/// CR decomposition without enforcing the CR conditions; `is_cr` reports them.
pub fn assess_cr(pg: &PointGeometry, space: &AmbientSpace, tol: f64) -> Result<CrDecomposition> {
    decompose(&pg.tangent_basis, space, tol)
}

/// CR decomposition at a point; fails if `D⊥` is not totally real or `D`
/// is not J-invariant within `tol`.
pub fn extract_cr(pg: &PointGeometry, space: &AmbientSpace, tol: f64) -> Result<CrDecomposition> {
    let dec = assess_cr(pg, space, tol)?;
    if dec.totally_real_residual > tol || dec.direct_sum_sigma < tolerances::DIRECT_SUM {
        return Err(GeomError::NotTotallyReal {
            residual: dec.totally_real_residual,
            point: pg.u.clone(),
        });
    }
    if dec.invariance_residual > tol {
        return Err(GeomError::NotInDistribution {
            which: "J-invariant",
            residual: dec.invariance_residual,
        });
    }
    Ok(dec)
}

/// `Q v` (onto `D`) or `Q⊥ v` (onto `D⊥`) for a tangent vector.
pub fn project(dec: &CrDecomposition, v: &DVector<f64>, onto: Distribution) -> Result<DVector<f64>> {
    let off = dec.tangent.residual(v);
    if off > 1e-8 * v.norm().max(1.0) {
        return Err(GeomError::NotTangent(off));
    }
    Ok(dec.subspace(onto.part()).project(v))
}

/// Projector fields at one chart point.
#[derive(Debug, Clone)]
pub struct LocalFrame {
    pub jacobian: DMatrix<f64>,
    pub pinv: DMatrix<f64>,
    proj: [DMatrix<f64>; 6],
    pub rank_d: usize,
    pub rank_dperp: usize,
}

impl LocalFrame {
    pub fn at(sub: &ChartedSubmanifold, space: &AmbientSpace, u: &[f64], fd: &FdConfig, tol: f64) -> Result<Self> {
        let jac = jacobian(sub, u, fd)?;
        let g = jac.transpose() * &jac;
        let ginv = g.try_inverse().ok_or(GeomError::ImmersionFailure {
            point: u.to_vec(),
            sigma: 0.0,
        })?;
        let pinv = &ginv * jac.transpose();
        let q = jac.clone().qr().q();
        let dec = decompose(&q, space, tol)?;
        let n = space.dim();
        let p_t = &q * q.transpose();
        let p_n = DMatrix::identity(n, n) - &p_t;
        let p_d = dec.d.projector();
        let p_dperp = &p_t - &p_d;
        let mut p_mu_perp = DMatrix::zeros(n, n);
        for alpha in Alpha::ALL {
            let j = space.triple().matrix(alpha);
            p_mu_perp += j * &p_dperp * j.transpose();
        }
        let p_mu = &p_n - &p_mu_perp;
        Ok(LocalFrame {
            jacobian: jac,
            pinv,
            proj: [p_t, p_n, p_d, p_dperp, p_mu_perp, p_mu],
            rank_d: dec.rank_d(),
            rank_dperp: dec.rank_dperp(),
        })
    }

    pub fn projector(&self, part: Part) -> &DMatrix<f64> {
        &self.proj[part.index()]
    }

    /// `E^+ P`: chart components of the projected extension.
    pub fn coefficients(&self, part: Part) -> DMatrix<f64> {
        &self.pinv * self.projector(part)
    }
}

/// First-order jet of the projector fields at a chart point.
#[derive(Debug, Clone)]
pub struct FrameJet {
    pub center: LocalFrame,
    d_proj: Vec<[DMatrix<f64>; 6]>,
    d_coeff: Vec<[DMatrix<f64>; 6]>,
}

impl FrameJet {
    pub fn at(sub: &ChartedSubmanifold, space: &AmbientSpace, u: &[f64], fd: &FdConfig, tol: f64) -> Result<Self> {
        fd.validate()?;
        sub.check_margin(u, fd.field_step + fd.first_step)?;
        let samples = StencilSamples::collect(u, fd.field(), |p| LocalFrame::at(sub, space, p, fd, tol))?;
        for (axis, vals) in samples.axes.iter().enumerate() {
            for (lf, off) in vals.iter().zip(samples.stencil.offsets()) {
                let mut p = u.to_vec();
                p[axis] += off;
                for (which, expected, got) in [
                    ("D", samples.center.rank_d, lf.rank_d),
                    ("D-perp", samples.center.rank_dperp, lf.rank_dperp),
                ] {
                    if expected != got {
                        return Err(GeomError::NonConstantRank {
                            which,
                            expected,
                            got,
                            point: p,
                        });
                    }
                }
            }
        }
        let d_proj = (0..sub.k())
            .map(|i| Part::ALL.map(|part| samples.derivative(i, |lf: &LocalFrame| lf.projector(part).clone())))
            .collect();
        let d_coeff = (0..sub.k())
            .map(|i| Part::ALL.map(|part| samples.derivative(i, |lf: &LocalFrame| lf.coefficients(part))))
            .collect();
        Ok(FrameJet {
            center: samples.center,
            d_proj,
            d_coeff,
        })
    }

    pub fn projector(&self, part: Part) -> &DMatrix<f64> {
        self.center.projector(part)
    }

    /// `∂_i P` for the given part.
    pub fn projector_derivative(&self, axis: usize, part: Part) -> &DMatrix<f64> {
        &self.d_proj[axis][part.index()]
    }

    /// `∇̄_X (P v)`: flat derivative along the tangent vector `x` of the
    /// projected extension of the constant vector `v`.
    pub fn flat_derivative(&self, x: &DVector<f64>, part: Part, v: &DVector<f64>) -> DVector<f64> {
        let xc = &self.center.pinv * x;
        let mut acc = DVector::zeros(v.len());
        for (i, d) in self.d_proj.iter().enumerate() {
            if xc[i] != 0.0 {
                acc += (&d[part.index()] * v) * xc[i];
            }
        }
        acc
    }

    /// Lie bracket `[X̃, Z̃]` of projected extensions, computed from the chart
    /// coefficients `E^+ P v` and pushed forward to an ambient vector.
    pub fn bracket(&self, part_x: Part, x: &DVector<f64>, part_z: Part, z: &DVector<f64>) -> DVector<f64> {
        let cx = self.center.coefficients(part_x) * x;
        let cz = self.center.coefficients(part_z) * z;
        let k = cx.len();
        let mut coord = DVector::zeros(k);
        for i in 0..k {
            let d = &self.d_coeff[i];
            coord += (&d[part_z.index()] * z) * cx[i] - (&d[part_x.index()] * x) * cz[i];
        }
        &self.center.jacobian * coord
    }
}

/// Lie bracket of two fields given by chart components, `[X, Z]^i =
/// X^j ∂_j Z^i - Z^j ∂_j X^i`, by field-step differences of the components.
/// Returned in chart components.
pub fn chart_bracket<X, Z>(u: &[f64], x: X, z: Z, fd: &FdConfig) -> Result<DVector<f64>>
where
    X: Fn(&[f64]) -> Result<DVector<f64>>,
    Z: Fn(&[f64]) -> Result<DVector<f64>>,
{
    fd.validate()?;
    let xs = StencilSamples::collect(u, fd.field(), &x)?;
    let zs = StencilSamples::collect(u, fd.field(), &z)?;
    let mut out = DVector::zeros(u.len());
    for j in 0..u.len() {
        let dz: DVector<f64> = zs.derivative(j, |v: &DVector<f64>| v.clone());
        let dx: DVector<f64> = xs.derivative(j, |v: &DVector<f64>| v.clone());
        out += dz * xs.center[j] - dx * zs.center[j];
    }
    Ok(out)
}

/// Second fundamental form of a distribution: for `which = D⊥` this is
/// `h⊥(X, Z) = Q ∇_X Z̃ ∈ D`; for `which = D` it is `h(X, Z) = Q⊥ ∇_X Z̃ ∈ D⊥`.
#[allow(clippy::too_many_arguments)]
pub fn distribution_sff(
    sub: &ChartedSubmanifold,
    space: &AmbientSpace,
    which: Distribution,
    u: &[f64],
    x: &DVector<f64>,
    z: &DVector<f64>,
    fd: &FdConfig,
    tol: f64,
) -> Result<DVector<f64>> {
    let jet = FrameJet::at(sub, space, u, fd, tol)?;
    distribution_sff_at(&jet, which, x, z)
}

/// [`distribution_sff`] on a precomputed jet.
pub fn distribution_sff_at(
    jet: &FrameJet,
    which: Distribution,
    x: &DVector<f64>,
    z: &DVector<f64>,
) -> Result<DVector<f64>> {
    let p = jet.projector(which.part());
    for v in [x, z] {
        let off = (v - p * v).norm();
        if off > 1e-8 * v.norm().max(1.0) {
            return Err(GeomError::NotInDistribution {
                which: which.label(),
                residual: off,
            });
        }
    }
    let flat = jet.flat_derivative(x, which.part(), z);
    Ok(jet.projector(which.complement().part()) * flat)
}
