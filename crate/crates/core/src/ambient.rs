//! The flat ambient model `H^m` and the curvature tensor of a quaternion
//! space form.
//!
//! Sign convention: [`space_form_curvature`] returns
//! `g(R(X,Y)Z, U)` with `R(X,Y) = [∇_X, ∇_Y] - ∇_[X,Y]`, so that for an
//! orthonormal pair the sectional curvature is `g(R(X,Y)Y, X)`. The same
//! convention is used for the intrinsic curvature of submanifolds in
//! [`crate::immersion::curvature`].

use nalgebra::DVector;

use crate::error::{GeomError, Result};
use crate::fd::FdConfig;
use crate::quatlin::{Alpha, QuaternionTriple};

/// Flat `H^m` with its canonical quaternion triple, the Euclidean metric and a
/// space-form parameter `c` used only by the algebraic curvature evaluator.
#[derive(Debug, Clone, PartialEq)]
pub struct AmbientSpace {
    m: usize,
    triple: QuaternionTriple,
    c: f64,
    /// Connection one-forms of the triple; identically zero for the
    /// constant canonical basis, so every `J_a` is parallel.
    omega: [DVector<f64>; 3],
}

impl AmbientSpace {
    pub fn flat(m: usize) -> Result<Self> {
        Self::with_curvature(m, 0.0)
    }

    pub fn with_curvature(m: usize, c: f64) -> Result<Self> {
        let triple = QuaternionTriple::new(m)?;
        if !c.is_finite() {
            return Err(GeomError::Config(format!(
                "space-form parameter must be finite, got {c}"
            )));
        }
        let n = 4 * m;
        Ok(AmbientSpace {
            m,
            triple,
            c,
            omega: [DVector::zeros(n), DVector::zeros(n), DVector::zeros(n)],
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        4 * self.m
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn triple(&self) -> &QuaternionTriple {
        &self.triple
    }

    pub fn j(&self, alpha: Alpha, v: &DVector<f64>) -> DVector<f64> {
        self.triple.apply(alpha, v)
    }

    pub fn metric(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(y)
    }

    /// `ω_a(X)`; always zero for the flat canonical basis.
    pub fn connection_form(&self, alpha: Alpha, x: &DVector<f64>) -> f64 {
        self.omega[alpha.index() - 1].dot(x)
    }

    fn check(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() == self.dim() {
            Ok(())
        } else {
            Err(GeomError::Shape {
                expected: self.dim(),
                got: v.len(),
            })
        }
    }
}

/// A value `g(R(X,Y)Z, U)` together with its arguments.
#[derive(Debug, Clone, PartialEq)]
pub struct CurvatureValue {
    pub value: f64,
    pub inputs: [DVector<f64>; 4],
}

/// Curvature of the quaternion space form of parameter `c`, evaluated with the
/// canonical triple:
///
/// `(c/4) { <Z,Y><X,U> - <X,Z><Y,U>
///          + Σ_a [<Z,J_a Y><J_a X,U> - <Z,J_a X><J_a Y,U> + 2<X,J_a Y><J_a Z,U>] }`.
pub fn space_form_curvature(
    space: &AmbientSpace,
    x: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    u: &DVector<f64>,
) -> Result<CurvatureValue> {
    for v in [x, y, z, u] {
        space.check(v)?;
    }
    let g = |a: &DVector<f64>, b: &DVector<f64>| a.dot(b);
    let mut sum = g(z, y) * g(x, u) - g(x, z) * g(y, u);
    for alpha in Alpha::ALL {
        let jx = space.j(alpha, x);
        let jy = space.j(alpha, y);
        let jz = space.j(alpha, z);
        sum += g(z, &jy) * g(&jx, u) - g(z, &jx) * g(&jy, u) + 2.0 * g(x, &jy) * g(&jz, u);
    }
    Ok(CurvatureValue {
        value: 0.25 * space.c * sum,
        inputs: [x.clone(), y.clone(), z.clone(), u.clone()],
    })
}

/// `g(R(X, J_a X) J_a X, X)` for a unit vector `X`.
pub fn quaternion_sectional_curvature(space: &AmbientSpace, x: &DVector<f64>, alpha: usize) -> Result<f64> {
    let alpha = Alpha::new(alpha)?;
    space.check(x)?;
    let norm = x.norm();
    if (norm - 1.0).abs() > 1e-10 {
        return Err(GeomError::NotUnit { norm });
    }
    let jx = space.j(alpha, x);
    Ok(space_form_curvature(space, x, &jx, &jx, x)?.value)
}

/// A vector field on the ambient space.
pub type VectorField<'a> = &'a dyn Fn(&DVector<f64>) -> DVector<f64>;

/// `g(R(X,Y)Z, U)` at `point` for the flat Levi-Civita connection, computed
/// from nested finite differences of the fields:
/// `∇_X ∇_Y Z - ∇_Y ∇_X Z - ∇_[X,Y] Z` with `∇_V W = DW · V`.
pub fn flat_curvature_numeric(
    space: &AmbientSpace,
    point: &DVector<f64>,
    fields: [VectorField<'_>; 4],
    fd: &FdConfig,
) -> Result<f64> {
    if space.c != 0.0 {
        return Err(GeomError::Inapplicable(format!(
            "numerical ambient curvature exists only for the flat model, c = {}",
            space.c
        )));
    }
    fd.validate()?;
    space.check(point)?;
    let [xf, yf, zf, uf] = fields;
    let inner = fd.field();
    let outer = fd.field();

    // directional derivative of a field w along the vector v at p
    let ddir = |w: &dyn Fn(&DVector<f64>) -> DVector<f64>, p: &DVector<f64>, v: &DVector<f64>| {
        inner.derivative(|s| Ok(w(&(p + v * s))))
    };
    let zy = |p: &DVector<f64>| ddir(zf, p, &yf(p));
    let zx = |p: &DVector<f64>| ddir(zf, p, &xf(p));
    let x = xf(point);
    let y = yf(point);
    let d_zy_x = outer.derivative(|s| zy(&(point + &x * s)))?;
    let d_zx_y = outer.derivative(|s| zx(&(point + &y * s)))?;
    let bracket = ddir(yf, point, &x)? - ddir(xf, point, &y)?;
    let z_bracket = ddir(zf, point, &bracket)?;
    let r = d_zy_x - d_zx_y - z_bracket;
    Ok(r.dot(&uf(point)))
}
