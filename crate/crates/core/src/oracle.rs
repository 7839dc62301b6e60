//! Brute-force recomputations that share no stencil code with the main
//! pipeline: the second fundamental form from polarized second differences
//! with an SVD normal space, and Lie brackets from flow commutators.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::ambient::AmbientSpace;
use crate::crgeom::{LocalFrame, Part};
use crate::error::{GeomError, Result};
use crate::fd::FdConfig;
use crate::immersion::ChartedSubmanifold;
use crate::quatlin;
use crate::tolerances;

/// A vector field given by its chart components.
pub type ChartField = Arc<dyn Fn(&[f64]) -> Result<DVector<f64>> + Send + Sync>;

const JACOBIAN_STEP: f64 = 1e-3;
const SECOND_STEP: f64 = 1e-2;
const FLOW_STEP: f64 = 1e-3;

fn shifted(u: &[f64], v: &[f64], t: f64) -> Vec<f64> {
    u.iter().zip(v).map(|(a, b)| a + t * b).collect()
}

fn unit(k: usize, i: usize) -> Vec<f64> {
    let mut e = vec![0.0; k];
    e[i] = 1.0;
    e
}

/// Five-point Jacobian.
pub fn jacobian_5pt(sub: &ChartedSubmanifold, u: &[f64]) -> Result<DMatrix<f64>> {
    let h = JACOBIAN_STEP;
    sub.check_margin(u, 2.0 * h)?;
    let mut cols = Vec::with_capacity(sub.k());
    for i in 0..sub.k() {
        let e = unit(sub.k(), i);
        let f = |t: f64| sub.eval(&shifted(u, &e, t));
        let col = (f(-2.0 * h)? - f(2.0 * h)? + (f(h)? - f(-h)?) * 8.0) / (12.0 * h);
        cols.push(col);
    }
    Ok(DMatrix::from_columns(&cols))
}

/// Second fundamental form in chart coordinates, `B_ij = P_N ∂_i ∂_j f`.
#[derive(Debug, Clone)]
pub struct BruteForceSff {
    pub jacobian: DMatrix<f64>,
    pub normal_projector: DMatrix<f64>,
    /// `[i][j]`.
    pub coord: Vec<Vec<DVector<f64>>>,
}

impl BruteForceSff {
    /// `B(X, Y)` for ambient tangent vectors.
    pub fn apply(&self, x: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
        let pinv = self
            .jacobian
            .clone()
            .pseudo_inverse(1e-12)
            .expect("pseudo-inverse of a finite matrix");
        let (xc, yc) = (&pinv * x, &pinv * y);
        let mut out = DVector::zeros(x.len());
        for (i, row) in self.coord.iter().enumerate() {
            for (j, b) in row.iter().enumerate() {
                out.axpy(xc[i] * yc[j], b, 1.0);
            }
        }
        out
    }
}

/// Brute-force second fundamental form at `u`: directional second
/// differences at steps `h/2` and `h/4`, Richardson-combined and polarized,
/// projected on the normal space of an SVD of a five-point Jacobian.
#[allow(clippy::needless_range_loop)]
pub fn bruteforce_b(sub: &ChartedSubmanifold, space: &AmbientSpace, u: &[f64]) -> Result<BruteForceSff> {
    if space.dim() != sub.ambient_dim() {
        return Err(GeomError::Shape {
            expected: space.dim(),
            got: sub.ambient_dim(),
        });
    }
    let h = SECOND_STEP;
    sub.check_margin(u, h)?;
    let k = sub.k();
    let jac = jacobian_5pt(sub, u)?;
    let svd = jac.clone().svd(true, false);
    let uu = svd.u.as_ref().expect("left singular vectors requested");
    let smax = svd.singular_values.max();
    let mut p_t = DMatrix::zeros(space.dim(), space.dim());
    for (c, s) in svd.singular_values.iter().enumerate() {
        if *s > 1e-8 * smax {
            let col = uu.column(c);
            p_t += col * col.transpose();
        }
    }
    let p_n = DMatrix::identity(space.dim(), space.dim()) - p_t;

    let f0 = sub.eval(u)?;
    let second = |v: &[f64]| -> Result<DVector<f64>> {
        let d = |s: f64| -> Result<DVector<f64>> {
            Ok((sub.eval(&shifted(u, v, s))? + sub.eval(&shifted(u, v, -s))? - &f0 * 2.0) / (s * s))
        };
        Ok((d(h / 4.0)? * 4.0 - d(h / 2.0)?) / 3.0)
    };
    let mut coord = vec![vec![DVector::zeros(space.dim()); k]; k];
    for i in 0..k {
        coord[i][i] = &p_n * second(&unit(k, i))?;
        for j in i + 1..k {
            let plus: Vec<f64> = (0..k).map(|l| unit(k, i)[l] + unit(k, j)[l]).collect();
            let minus: Vec<f64> = (0..k).map(|l| unit(k, i)[l] - unit(k, j)[l]).collect();
            let b = &p_n * ((second(&plus)? - second(&minus)?) / 4.0);
            coord[i][j] = b.clone();
            coord[j][i] = b;
        }
    }
    Ok(BruteForceSff {
        jacobian: jac,
        normal_projector: p_n,
        coord,
    })
}

fn rk4(sub: &ChartedSubmanifold, field: &ChartField, u: &[f64], t: f64) -> Result<Vec<f64>> {
    let inside = |p: &[f64]| -> Result<()> {
        if sub.boundary_distance(p) <= 0.0 {
            Err(GeomError::FlowDomain { point: p.to_vec() })
        } else {
            Ok(())
        }
    };
    inside(u)?;
    let k1 = field(u)?;
    let p2 = shifted(u, k1.as_slice(), t / 2.0);
    inside(&p2)?;
    let k2 = field(&p2)?;
    let p3 = shifted(u, k2.as_slice(), t / 2.0);
    inside(&p3)?;
    let k3 = field(&p3)?;
    let p4 = shifted(u, k3.as_slice(), t);
    inside(&p4)?;
    let k4 = field(&p4)?;
    let step = (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (t / 6.0);
    let out = shifted(u, step.as_slice(), 1.0);
    inside(&out)?;
    Ok(out)
}

/// `(φ^Z_{-h} φ^X_{-h} φ^Z_h φ^X_h (u) - u) / h²`.
fn commutator(sub: &ChartedSubmanifold, x: &ChartField, z: &ChartField, u: &[f64], h: f64) -> Result<DVector<f64>> {
    let p = rk4(sub, x, u, h)?;
    let p = rk4(sub, z, &p, h)?;
    let p = rk4(sub, x, &p, -h)?;
    let p = rk4(sub, z, &p, -h)?;
    Ok(DVector::from_iterator(
        u.len(),
        p.iter().zip(u).map(|(a, b)| (a - b) / (h * h)),
    ))
}

/// Lie bracket `[X, Z]` of two chart fields at `u` from the flow
/// commutator, Richardson-combined over `h` and `h/2`, pushed forward to the
/// ambient space.
pub fn bruteforce_bracket(sub: &ChartedSubmanifold, u: &[f64], x: &ChartField, z: &ChartField) -> Result<DVector<f64>> {
    let h = FLOW_STEP;
    let coarse = commutator(sub, x, z, u, h)?;
    let fine = commutator(sub, x, z, u, h / 2.0)?;
    let coord = fine * 2.0 - coarse;
    Ok(jacobian_5pt(sub, u)? * coord)
}

/// Chart components of the projected extension `P_part(u') v` of a constant
/// ambient vector.
pub fn projected_field(
    sub: &ChartedSubmanifold,
    space: &AmbientSpace,
    part: Part,
    v: DVector<f64>,
    fd: FdConfig,
) -> ChartField {
    let (sub, space) = (sub.clone(), space.clone());
    Arc::new(move |q: &[f64]| {
        let lf = LocalFrame::at(&sub, &space, q, &fd, tolerances::CR)?;
        Ok(lf.coefficients(part) * &v)
    })
}

/// Distance of `[X, Z]` from the plane spanned by `X` and `Z` at `u`,
/// brackets by flow commutator. Zero for an integrable plane field.
pub fn bracket_defect(sub: &ChartedSubmanifold, u: &[f64], x: &ChartField, z: &ChartField) -> Result<f64> {
    let b = bruteforce_bracket(sub, u, x, z)?;
    let jac = jacobian_5pt(sub, u)?;
    let span = quatlin::orthonormalize(sub.ambient_dim(), &[&jac * x(u)?, &jac * z(u)?], 1e-10)?;
    Ok(span.residual(&b))
}

/// Linear chart `(x, y, z) ↦ (x, y, z, 0) ⊂ H¹` with the contact plane field
/// `span{∂y, ∂x + y ∂z}`, which is nowhere integrable: `[∂y, ∂x + y ∂z] = ∂z`.
pub fn contact_plane_fixture() -> Result<(ChartedSubmanifold, ChartField, ChartField)> {
    let sub = ChartedSubmanifold::new(
        "contact-plane",
        1,
        vec![(-1.0, 1.0); 3],
        Arc::new(|u: &[f64]| DVector::from_vec(vec![u[0], u[1], u[2], 0.0])),
    )?
    .with_grid(&[3, 3, 3], 0.25)?;
    let y: ChartField = Arc::new(|_: &[f64]| Ok(DVector::from_vec(vec![0.0, 1.0, 0.0])));
    let x: ChartField = Arc::new(|u: &[f64]| Ok(DVector::from_vec(vec![1.0, 0.0, u[1]])));
    Ok((sub, y, x))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn plane() -> ChartedSubmanifold {
        ChartedSubmanifold::new(
            "plane2",
            1,
            vec![(-1.0, 1.0); 2],
            Arc::new(|u: &[f64]| DVector::from_vec(vec![u[0], u[1], 0.0, 0.0])),
        )
        .unwrap()
    }

    #[test]
    fn textbook_bracket() {
        let sub = plane();
        let x: ChartField = Arc::new(|_: &[f64]| Ok(DVector::from_vec(vec![1.0, 0.0])));
        let z: ChartField = Arc::new(|u: &[f64]| Ok(DVector::from_vec(vec![0.0, u[0]])));
        let b = bruteforce_bracket(&sub, &[0.2, -0.1], &x, &z).unwrap();
        assert!((b - DVector::from_vec(vec![0.0, 1.0, 0.0, 0.0])).norm() < 1e-8);
    }

    #[test]
    fn commuting_fields() {
        let sub = plane();
        let x: ChartField = Arc::new(|_: &[f64]| Ok(DVector::from_vec(vec![1.0, 0.0])));
        let z: ChartField = Arc::new(|_: &[f64]| Ok(DVector::from_vec(vec![0.0, 1.0])));
        assert!(bruteforce_bracket(&sub, &[0.0, 0.0], &x, &z).unwrap().norm() < 1e-9);
    }

    #[test]
    fn flow_leaving_the_domain() {
        let sub = plane();
        let x: ChartField = Arc::new(|_: &[f64]| Ok(DVector::from_vec(vec![1e4, 0.0])));
        let z = x.clone();
        assert!(matches!(
            bruteforce_bracket(&sub, &[0.0, 0.0], &x, &z),
            Err(GeomError::FlowDomain { .. })
        ));
    }

    #[test]
    fn contact_plane_is_not_integrable() {
        let (sub, x, z) = contact_plane_fixture().unwrap();
        for u in sub.sample_points() {
            assert!(bracket_defect(&sub, u, &x, &z).unwrap() > 0.5);
        }
    }
}
