use nalgebra::{DMatrix, DVector};

use super::chart::{jacobian, ChartedSubmanifold};
use super::curvature::{christoffel_from_metric_jet, metric_samples, Christoffel};
use crate::ambient::AmbientSpace;
use crate::error::{GeomError, Result};
use crate::fd::FdConfig;
use crate::tolerances;

/// First- and second-order geometry of the submanifold at one chart point.
#[derive(Debug, Clone)]
pub struct PointGeometry {
    pub u: Vec<f64>,
    pub position: DVector<f64>,
    /// Coordinate tangent fields `∂f/∂u_i` as columns.
    pub jacobian: DMatrix<f64>,
    /// Left inverse `(E^T E)^{-1} E^T`: ambient tangent vector to chart components.
    pub pinv: DMatrix<f64>,
    pub tangent_basis: DMatrix<f64>,
    pub normal_basis: DMatrix<f64>,
    pub induced_metric: DMatrix<f64>,
    pub christoffel: Christoffel,
    /// Raw second derivatives `∂i ∂j f`, row-major `k × k`.
    pub hessian: Vec<DVector<f64>>,
    /// `B(∂i, ∂j)` in normal-basis components, row-major `k × k`.
    pub sff: Vec<DVector<f64>>,
}

impl PointGeometry {
    pub fn k(&self) -> usize {
        self.jacobian.ncols()
    }

    pub fn n(&self) -> usize {
        self.jacobian.nrows()
    }

    pub fn tangent_projector(&self) -> DMatrix<f64> {
        &self.tangent_basis * self.tangent_basis.transpose()
    }

    pub fn normal_projector(&self) -> DMatrix<f64> {
        &self.normal_basis * self.normal_basis.transpose()
    }

    /// Norm of the normal component of `v`.
    pub fn tangent_residual(&self, v: &DVector<f64>) -> f64 {
        (self.normal_basis.transpose() * v).norm()
    }

    /// Norm of the tangential component of `v`.
    pub fn normal_residual(&self, v: &DVector<f64>) -> f64 {
        (self.tangent_basis.transpose() * v).norm()
    }

    pub fn chart_components(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.pinv * v
    }

    /// `B(∂i, ∂j)` as an ambient normal vector.
    pub fn sff_coord(&self, i: usize, j: usize) -> DVector<f64> {
        &self.normal_basis * &self.sff[i * self.k() + j]
    }

    /// `B(X, Y)` for ambient tangent vectors, as an ambient normal vector.
    pub fn sff(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let xc = self.chart_components(x);
        let yc = self.chart_components(y);
        let k = self.k();
        let mut acc = DVector::zeros(self.n() - k);
        for i in 0..k {
            for j in 0..k {
                let w = xc[i] * yc[j];
                if w != 0.0 {
                    acc.axpy(w, &self.sff[i * k + j], 1.0);
                }
            }
        }
        &self.normal_basis * acc
    }

    /// `∇_X Y` for chart-component vectors: the induced Levi-Civita
    /// connection applied to the coordinate extension of `y`.
    pub fn covariant_coord(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let k = self.k();
        DVector::from_fn(k, |l, _| {
            let mut s = 0.0;
            for i in 0..k {
                for j in 0..k {
                    s += self.christoffel.get(l, i, j) * x[i] * y[j];
                }
            }
            s
        })
    }
}

/// `A_N` as a symmetric matrix in the orthonormal tangent basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ShapeOperatorValue {
    pub normal: DVector<f64>,
    pub matrix: DMatrix<f64>,
    tangent_basis: DMatrix<f64>,
}

impl ShapeOperatorValue {
    /// `A_N X` as an ambient tangent vector.
    pub fn apply(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.tangent_basis * (&self.matrix * (self.tangent_basis.transpose() * x))
    }

    pub fn asymmetry(&self) -> f64 {
        (&self.matrix - self.matrix.transpose()).amax()
    }
}

/// Symmetric matrix of raw second derivatives `∂i ∂j f`, row-major.
pub fn hessian(sub: &ChartedSubmanifold, u: &[f64], fd: &FdConfig) -> Result<Vec<DVector<f64>>> {
    fd.validate()?;
    sub.check_margin(u, fd.second_step)?;
    let k = sub.k();
    let stencil = fd.second();
    let mut out = vec![DVector::zeros(sub.ambient_dim()); k * k];
    let mut p = u.to_vec();
    for i in 0..k {
        for j in i..k {
            let d = stencil.second_derivative(i == j, |a, b| {
                p.copy_from_slice(u);
                p[i] += a;
                p[j] += b;
                sub.eval(&p)
            })?;
            out[j * k + i] = d.clone();
            out[i * k + j] = d;
        }
    }
    Ok(out)
}

/// Orthonormal completion of the columns of `q` to a basis of `R^n`: the
/// coordinate axes are added greedily by largest residual, lowest index on ties.
fn complete_basis(q: &DMatrix<f64>) -> DMatrix<f64> {
    let n = q.nrows();
    let mut basis: Vec<DVector<f64>> = q.column_iter().map(|c| c.into_owned()).collect();
    let k = basis.len();
    let mut added: Vec<DVector<f64>> = Vec::new();
    while basis.len() < n {
        let mut best: Option<(f64, DVector<f64>)> = None;
        for j in 0..n {
            let mut w = DVector::zeros(n);
            w[j] = 1.0;
            for _ in 0..2 {
                for b in &basis {
                    let c = b.dot(&w);
                    w.axpy(-c, b, 1.0);
                }
            }
            let norm = w.norm();
            if best.as_ref().is_none_or(|(bn, _)| norm > *bn + 1e-12) {
                best = Some((norm, w));
            }
        }
        let (norm, w) = best.expect("n > 0");
        let w = w / norm;
        basis.push(w.clone());
        added.push(w);
    }
    debug_assert_eq!(added.len(), n - k);
    if added.is_empty() {
        DMatrix::zeros(n, 0)
    } else {
        DMatrix::from_columns(&added)
    }
}

/// Tangent and normal bases, induced metric, Christoffel symbols and second
/// fundamental form at `u`.
#[allow(clippy::neg_cmp_op_on_partial_ord)]
pub fn point_geometry(
    sub: &ChartedSubmanifold,
    space: &AmbientSpace,
    u: &[f64],
    fd: &FdConfig,
) -> Result<PointGeometry> {
    if space.dim() != sub.ambient_dim() {
        return Err(GeomError::Shape {
            expected: space.dim(),
            got: sub.ambient_dim(),
        });
    }
    fd.validate()?;
    sub.check_margin(u, fd.field_step + fd.first_step.max(fd.second_step))?;
    let position = sub.eval(u)?;
    let jac = jacobian(sub, u, fd)?;
    let sv = jac.singular_values();
    let (smin, smax) = (sv.min(), sv.max());
    // negated so that NaN singular values are rejected too
    if !(smin > tolerances::RANK * smax) {
        return Err(GeomError::ImmersionFailure {
            point: u.to_vec(),
            sigma: smin,
        });
    }
    let metric = jac.transpose() * &jac;
    let metric_inv = metric
        .clone()
        .cholesky()
        .ok_or(GeomError::ImmersionFailure {
            point: u.to_vec(),
            sigma: smin,
        })?
        .inverse();
    let pinv = &metric_inv * jac.transpose();
    let tangent_basis = jac.clone().qr().q();
    let normal_basis = complete_basis(&tangent_basis);

    let samples = metric_samples(sub, u, fd)?;
    let christoffel = christoffel_from_metric_jet(&samples);

    let hess = hessian(sub, u, fd)?;
    let nt = normal_basis.transpose();
    let sff = hess.iter().map(|h| &nt * h).collect();

    Ok(PointGeometry {
        u: u.to_vec(),
        position,
        jacobian: jac,
        pinv,
        tangent_basis,
        normal_basis,
        induced_metric: metric,
        christoffel,
        hessian: hess,
        sff,
    })
}

/// Shape operator `A_N` defined by `g(A_N X, Y) = <B(X, Y), N>`.
pub fn shape_operator(pg: &PointGeometry, normal: &DVector<f64>) -> Result<ShapeOperatorValue> {
    if normal.len() != pg.n() {
        return Err(GeomError::Shape {
            expected: pg.n(),
            got: normal.len(),
        });
    }
    let tangential = pg.normal_residual(normal);
    if tangential > 1e-8 * normal.norm().max(1.0) {
        return Err(GeomError::NotNormal(tangential));
    }
    let k = pg.k();
    let t = &pg.tangent_basis;
    let cols: Vec<DVector<f64>> = (0..k).map(|a| t.column(a).into_owned()).collect();
    let mut matrix = DMatrix::zeros(k, k);
    for a in 0..k {
        for b in a..k {
            let v = pg.sff(&cols[a], &cols[b]).dot(normal);
            matrix[(a, b)] = v;
            matrix[(b, a)] = v;
        }
    }
    Ok(ShapeOperatorValue {
        normal: normal.clone(),
        matrix,
        tangent_basis: t.clone(),
    })
}

/// Weingarten split of the flat derivative of a normal field along `∂_direction`:
/// `∇̄_X N = -A_N X + ∇⊥_X N`.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalDerivative {
    pub flat: DVector<f64>,
    /// `∇⊥_X N`.
    pub normal_part: DVector<f64>,
    /// `-A_N X`.
    pub tangential_part: DVector<f64>,
}

/// Normal connection `∇⊥_X N` for `X = ∂f/∂u_direction`. The field must stay
/// normal (within `1e-6`) on the whole stencil.
pub fn normal_connection(
    sub: &ChartedSubmanifold,
    space: &AmbientSpace,
    u: &[f64],
    n_field: &dyn Fn(&[f64]) -> Result<DVector<f64>>,
    direction: usize,
    fd: &FdConfig,
) -> Result<NormalDerivative> {
    if direction >= sub.k() {
        return Err(GeomError::Shape {
            expected: sub.k(),
            got: direction,
        });
    }
    if space.dim() != sub.ambient_dim() {
        return Err(GeomError::Shape {
            expected: space.dim(),
            got: sub.ambient_dim(),
        });
    }
    fd.validate()?;
    sub.check_margin(u, fd.field_step + fd.first_step)?;
    let stencil = fd.field();
    let mut p = u.to_vec();
    let mut drift: f64 = 0.0;
    let mut check = |q: &[f64]| -> Result<DVector<f64>> {
        let n = n_field(q)?;
        let jac = jacobian(sub, q, fd)?;
        let qb = jac.qr().q();
        drift = drift.max((qb.transpose() * &n).norm());
        Ok(n)
    };
    check(u)?;
    let flat = stencil.derivative(|s| {
        p[direction] = u[direction] + s;
        check(&p)
    })?;
    if drift > 1e-6 {
        return Err(GeomError::NormalDrift(drift));
    }
    let jac = jacobian(sub, u, fd)?;
    let q = jac.qr().q();
    let tangential_part = &q * (q.transpose() * &flat);
    let normal_part = &flat - &tangential_part;
    Ok(NormalDerivative {
        flat,
        normal_part,
        tangential_part,
    })
}
