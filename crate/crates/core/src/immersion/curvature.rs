//! Intrinsic curvature of a chart from its induced metric.
//!
//! `R(∂i, ∂j) ∂k = R^l_{ijk} ∂l` with
//! `R^l_{ijk} = ∂i Γ^l_{jk} - ∂j Γ^l_{ik} + Γ^l_{im} Γ^m_{jk} - Γ^l_{jm} Γ^m_{ik}`,
//! i.e. `R(X,Y) = [∇_X, ∇_Y] - ∇_[X,Y]`.

use nalgebra::{DMatrix, DVector};

use super::chart::{jacobian, ChartedSubmanifold};
use super::geometry::PointGeometry;
use super::jet::StencilSamples;
use crate::ambient::AmbientSpace;
use crate::error::{GeomError, Result};
use crate::fd::FdConfig;

/// Christoffel symbols `Γ^l_{ij}` of the induced metric.
#[derive(Debug, Clone, PartialEq)]
pub struct Christoffel {
    k: usize,
    data: Vec<f64>,
}

impl Christoffel {
    pub fn zeros(k: usize) -> Self {
        Christoffel {
            k,
            data: vec![0.0; k * k * k],
        }
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, l: usize, i: usize, j: usize) -> f64 {
        self.data[(l * self.k + i) * self.k + j]
    }

    fn set(&mut self, l: usize, i: usize, j: usize, v: f64) {
        self.data[(l * self.k + i) * self.k + j] = v;
    }

    pub fn as_vector(&self) -> DVector<f64> {
        DVector::from_column_slice(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

pub(crate) fn metric_at(sub: &ChartedSubmanifold, u: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    let j = jacobian(sub, u, fd)?;
    Ok(j.transpose() * j)
}

pub(crate) fn metric_samples(
    sub: &ChartedSubmanifold,
    u: &[f64],
    fd: &FdConfig,
) -> Result<StencilSamples<DMatrix<f64>>> {
    StencilSamples::collect(u, fd.field(), |p| metric_at(sub, p, fd))
}

/// `Γ^l_{ij} = ½ g^{lm} (∂i g_jm + ∂j g_im - ∂m g_ij)`.
pub(crate) fn christoffel_from_metric_jet(samples: &StencilSamples<DMatrix<f64>>) -> Christoffel {
    let g = &samples.center;
    let k = g.nrows();
    let ginv = g
        .clone()
        .try_inverse()
        .unwrap_or_else(|| DMatrix::from_element(k, k, f64::NAN));
    let dg: Vec<DMatrix<f64>> = samples.gradient(|m| m.clone());
    let mut out = Christoffel::zeros(k);
    for i in 0..k {
        for j in 0..k {
            let lower = DVector::from_fn(k, |m, _| 0.5 * (dg[i][(j, m)] + dg[j][(i, m)] - dg[m][(i, j)]));
            let upper = &ginv * lower;
            for l in 0..k {
                out.set(l, i, j, upper[l]);
            }
        }
    }
    out
}

/// Christoffel symbols at `u` from a field-step derivative of the metric.
pub fn christoffel_at(sub: &ChartedSubmanifold, u: &[f64], fd: &FdConfig) -> Result<Christoffel> {
    fd.validate()?;
    sub.check_margin(u, fd.field_step + fd.first_step)?;
    Ok(christoffel_from_metric_jet(&metric_samples(sub, u, fd)?))
}

/// Riemann tensor of the induced metric at a chart point.
#[derive(Debug, Clone, PartialEq)]
pub struct RiemannTensor {
    k: usize,
    metric: DMatrix<f64>,
    /// `R^l_{ijk}` at `((l * k + i) * k + j) * k + kk`.
    data: Vec<f64>,
    /// `g(R(∂i, ∂j) ∂k, ∂l)` at `((i * k + j) * k + kk) * k + l`.
    low: Vec<f64>,
}

impl RiemannTensor {
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn metric(&self) -> &DMatrix<f64> {
        &self.metric
    }

    pub fn upper(&self, l: usize, i: usize, j: usize, kk: usize) -> f64 {
        let k = self.k;
        self.data[((l * k + i) * k + j) * k + kk]
    }

    /// `g(R(∂i, ∂j) ∂k, ∂l)`.
    pub fn lowered(&self, i: usize, j: usize, kk: usize, l: usize) -> f64 {
        let k = self.k;
        self.low[((i * k + j) * k + kk) * k + l]
    }

    /// `g(R(X, Y) Z, W)` for chart-component vectors.
    pub fn eval(&self, x: &DVector<f64>, y: &DVector<f64>, z: &DVector<f64>, w: &DVector<f64>) -> f64 {
        // Contract one slot at a time, last index first.
        let contract = |t: &[f64], v: &DVector<f64>| -> Vec<f64> {
            t.chunks(self.k)
                .map(|c| c.iter().zip(v.iter()).map(|(a, b)| a * b).sum())
                .collect()
        };
        let t = contract(&self.low, w);
        let t = contract(&t, z);
        let t = contract(&t, y);
        contract(&t, x)[0]
    }

    /// Sectional curvature of the plane spanned by `x`, `y` (chart components).
    pub fn sectional(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        let g = &self.metric;
        let gxx = (x.transpose() * g * x)[(0, 0)];
        let gyy = (y.transpose() * g * y)[(0, 0)];
        let gxy = (x.transpose() * g * y)[(0, 0)];
        self.eval(x, y, y, x) / (gxx * gyy - gxy * gxy)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |a, b| a.max(b.abs()))
    }
}

/// Riemann tensor at `u` from a field-step derivative of the Christoffel symbols.
pub fn riemann(sub: &ChartedSubmanifold, u: &[f64], fd: &FdConfig) -> Result<RiemannTensor> {
    fd.validate()?;
    sub.check_margin(u, fd.reach())?;
    let k = sub.k();
    let samples = StencilSamples::collect(u, fd.field(), |p| christoffel_at(sub, p, fd))?;
    let gamma = &samples.center;
    let dgamma: Vec<DVector<f64>> = samples.gradient(|c| c.as_vector());
    let idx = |l: usize, i: usize, j: usize| (l * k + i) * k + j;
    let mut data = vec![0.0; k * k * k * k];
    for l in 0..k {
        for i in 0..k {
            for j in 0..k {
                for kk in 0..k {
                    let mut v = dgamma[i][idx(l, j, kk)] - dgamma[j][idx(l, i, kk)];
                    for m in 0..k {
                        v += gamma.get(l, i, m) * gamma.get(m, j, kk) - gamma.get(l, j, m) * gamma.get(m, i, kk);
                    }
                    data[((l * k + i) * k + j) * k + kk] = v;
                }
            }
        }
    }
    let metric = metric_at(sub, u, fd)?;
    let mut low = vec![0.0; k * k * k * k];
    for i in 0..k {
        for j in 0..k {
            for kk in 0..k {
                for l in 0..k {
                    low[((i * k + j) * k + kk) * k + l] = (0..k)
                        .map(|m| data[((m * k + i) * k + j) * k + kk] * metric[(m, l)])
                        .sum();
                }
            }
        }
    }
    Ok(RiemannTensor { k, metric, data, low })
}

/// `|g(R̄(X,Y)Z,U) - g(R(X,Y)Z,U) - <B(X,Z),B(Y,U)> + <B(Y,Z),B(X,U)>|` from
/// precomputed pieces; `X, Y, Z, U` are ambient tangent vectors and the
/// ambient term is zero.
pub fn gauss_residual_at(
    pg: &PointGeometry,
    r: &RiemannTensor,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
) -> f64 {
    let c = |v: &DVector<f64>| pg.chart_components(v);
    let intrinsic = r.eval(&c(x), &c(y), &c(z), &c(w));
    let extrinsic = pg.sff(x, z).dot(&pg.sff(y, w)) - pg.sff(y, z).dot(&pg.sff(x, w));
    (0.0 - intrinsic - extrinsic).abs()
}

/// Gauss-equation residual at `u` for tangent vectors `X, Y, Z, U`.
#[allow(clippy::too_many_arguments)]
pub fn gauss_equation_residual(
    sub: &ChartedSubmanifold,
    space: &AmbientSpace,
    u: &[f64],
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    w: &DVector<f64>,
    fd: &FdConfig,
) -> Result<f64> {
    if space.c() != 0.0 {
        return Err(GeomError::Inapplicable(
            "the Gauss-equation residual needs the flat ambient model".into(),
        ));
    }
    let pg = super::geometry::point_geometry(sub, space, u, fd)?;
    for v in [x, y, z, w] {
        let res = pg.tangent_residual(v);
        if res > 1e-8 * v.norm().max(1.0) {
            return Err(GeomError::NotTangent(res));
        }
    }
    let r = riemann(sub, u, fd)?;
    Ok(gauss_residual_at(&pg, &r, x, y, z, w))
}
