use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2};

use nalgebra::DVector;

use super::{leaf, quaternion, ChartSpec, GridSpec, ScenarioSpec, ToleranceOverrides};
use crate::crgeom::Distribution::{Dperp, D};
use crate::immersion::LeafChart;
use crate::quatlin::quaternion_product;

/// A builtin chart family.
#[derive(Clone, Copy)]
pub struct Family {
    pub name: &'static str,
    pub summary: &'static str,
    pub m: usize,
    /// Parameter names and defaults.
    pub params: &'static [(&'static str, f64)],
    pub domain: fn() -> Vec<(f64, f64)>,
    pub eval: fn(&[f64], &[f64]) -> DVector<f64>,
    pub ranks: Option<(usize, usize)>,
    pub leaves: fn() -> Vec<LeafChart>,
}

impl std::fmt::Debug for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Family").field("name", &self.name).finish()
    }
}

fn unit_box(k: usize) -> Vec<(f64, f64)> {
    vec![(-1.0, 1.0); k]
}

fn no_leaves() -> Vec<LeafChart> {
    Vec::new()
}

fn leaves_q_t() -> Vec<LeafChart> {
    vec![leaf(D, &[0, 1, 2, 3]), leaf(Dperp, &[4])]
}

fn leaves_q() -> Vec<LeafChart> {
    vec![leaf(D, &[0, 1, 2, 3])]
}

fn leaves_surface() -> Vec<LeafChart> {
    vec![leaf(Dperp, &[0, 1])]
}

fn leaves_curve() -> Vec<LeafChart> {
    vec![leaf(Dperp, &[0])]
}

fn put(v: &mut DVector<f64>, factor: usize, q: [f64; 4]) {
    for (i, x) in q.into_iter().enumerate() {
        v[4 * factor + i] = x;
    }
}

fn plane(_: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(8);
    v[0] = u[0];
    v[4] = FRAC_1_SQRT_2 * u[1];
    v[6] = FRAC_1_SQRT_2 * u[1];
    v
}

fn circle(p: &[f64], u: &[f64]) -> DVector<f64> {
    let r = p[0];
    let mut v = DVector::zeros(8);
    v[0] = r * (u[0] / r).cos();
    v[4] = r * (u[0] / r).sin();
    v
}

fn sphere(p: &[f64], u: &[f64]) -> DVector<f64> {
    let r = p[0];
    let (theta, phi) = (u[0] + FRAC_PI_2, u[1]);
    let mut v = DVector::zeros(12);
    v[0] = r * theta.sin() * phi.cos();
    v[4] = r * theta.sin() * phi.sin();
    v[8] = r * theta.cos();
    v
}

fn qr_linear(_: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(8);
    put(&mut v, 0, [u[0], u[1], u[2], u[3]]);
    v[4] = u[4];
    v
}

fn qr_linear_wide(_: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(12);
    put(&mut v, 0, [u[0], u[1], u[2], u[3]]);
    v[4] = u[4];
    v[8] = u[5];
    v
}

fn q_times_circle(_: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(8);
    put(&mut v, 0, [u[0], u[1], u[2], u[3]]);
    v[4] = u[4].cos();
    v[5] = u[4].sin();
    v
}

fn totally_real_flat(_: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(8);
    v[0] = u[0];
    v[4] = u[1];
    v
}

fn totally_real_torus(_: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(12);
    v[0] = u[0].cos();
    v[4] = u[0].sin();
    v[8] = u[1].cos();
    v[9] = u[1].sin();
    v
}

fn twisted_product(_: &[f64], u: &[f64]) -> DVector<f64> {
    let q = [u[0], u[1], u[2], u[3]];
    let t = u[4];
    let mut v = DVector::zeros(8);
    put(&mut v, 0, quaternion_product(q, [t.cos(), t.sin(), 0.0, 0.0]));
    v[4] = t;
    v
}

/// `a(t) = a0 + a1 t + a2 t^2`, `γ(t) = g1 t + g2 t^2`; returns `q a(t) + γ(t)`.
fn twisted_second_factor(p: &[f64], u: &[f64]) -> [f64; 4] {
    let q = [u[0], u[1], u[2], u[3]];
    let t = u[4];
    let a: [f64; 4] =
        std::array::from_fn(|i| quaternion(p, 0)[i] + quaternion(p, 1)[i] * t + quaternion(p, 2)[i] * t * t);
    let qa = quaternion_product(q, a);
    std::array::from_fn(|i| qa[i] + quaternion(p, 3)[i] * t + quaternion(p, 4)[i] * t * t)
}

fn twisted_graph(p: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(8);
    put(&mut v, 0, [u[0], u[1], u[2], u[3]]);
    put(&mut v, 1, twisted_second_factor(p, u));
    v
}

fn twisted_graph_wide(p: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(12);
    put(&mut v, 0, [u[0], u[1], u[2], u[3]]);
    put(&mut v, 1, twisted_second_factor(p, u));
    let t = u[4];
    put(
        &mut v,
        2,
        std::array::from_fn(|i| quaternion(p, 5)[i] * t + quaternion(p, 6)[i] * t * t),
    );
    v
}

fn tilted_plane(_: &[f64], u: &[f64]) -> DVector<f64> {
    let mut v = DVector::zeros(8);
    v[0] = u[0];
    v[1] = FRAC_1_SQRT_2 * u[1];
    v[4] = FRAC_1_SQRT_2 * u[1];
    v
}

const TWISTED_PARAMS: [(&str, f64); 20] = [
    ("a0.1", 1.0),
    ("a0.i", 0.3),
    ("a0.j", -0.2),
    ("a0.k", 0.1),
    ("a1.1", 0.1),
    ("a1.i", -0.1),
    ("a1.j", 0.05),
    ("a1.k", 0.0),
    ("a2.1", 0.0),
    ("a2.i", 0.05),
    ("a2.j", 0.0),
    ("a2.k", 0.05),
    ("g1.1", 0.0),
    ("g1.i", 1.6),
    ("g1.j", 0.8),
    ("g1.k", 0.4),
    ("g2.1", 0.1),
    ("g2.i", 0.0),
    ("g2.j", -0.1),
    ("g2.k", 0.05),
];

const TWISTED_WIDE_PARAMS: [(&str, f64); 28] = [
    TWISTED_PARAMS[0],
    TWISTED_PARAMS[1],
    TWISTED_PARAMS[2],
    TWISTED_PARAMS[3],
    TWISTED_PARAMS[4],
    TWISTED_PARAMS[5],
    TWISTED_PARAMS[6],
    TWISTED_PARAMS[7],
    TWISTED_PARAMS[8],
    TWISTED_PARAMS[9],
    TWISTED_PARAMS[10],
    TWISTED_PARAMS[11],
    TWISTED_PARAMS[12],
    TWISTED_PARAMS[13],
    TWISTED_PARAMS[14],
    TWISTED_PARAMS[15],
    TWISTED_PARAMS[16],
    TWISTED_PARAMS[17],
    TWISTED_PARAMS[18],
    TWISTED_PARAMS[19],
    ("b1.1", 0.5),
    ("b1.i", 0.0),
    ("b1.j", 0.3),
    ("b1.k", 0.0),
    ("b2.1", 0.0),
    ("b2.i", 0.2),
    ("b2.j", 0.0),
    ("b2.k", -0.1),
];

static FAMILIES: &[Family] = &[
    Family {
        name: "plane",
        summary: "totally real plane spanned by 1 in the first factor and (1 + j)/sqrt2 in the second, in H^2",
        m: 2,
        params: &[],
        domain: || unit_box(2),
        eval: plane,
        ranks: Some((0, 2)),
        leaves: leaves_surface,
    },
    Family {
        name: "circle",
        summary: "circle of radius r in arc length, in the real plane of the two real axes of H^2",
        m: 2,
        params: &[("r", 1.0)],
        domain: || unit_box(1),
        eval: circle,
        ranks: Some((0, 1)),
        leaves: leaves_curve,
    },
    Family {
        name: "sphere",
        summary: "round 2-sphere of radius r in the real parts of H^3 (latitude, longitude chart)",
        m: 3,
        params: &[("r", 1.0)],
        domain: || unit_box(2),
        eval: sphere,
        ranks: Some((0, 2)),
        leaves: leaves_surface,
    },
    Family {
        name: "qr-linear",
        summary: "(q, t) in H^2: product of a quaternion line and a real line, totally geodesic",
        m: 2,
        params: &[],
        domain: || unit_box(5),
        eval: qr_linear,
        ranks: Some((4, 1)),
        leaves: leaves_q_t,
    },
    Family {
        name: "qr-linear-wide",
        summary: "(q, s, t) in H^3: quaternion line times a totally real plane, totally geodesic",
        m: 3,
        params: &[],
        domain: || unit_box(6),
        eval: qr_linear_wide,
        ranks: Some((4, 2)),
        leaves: || vec![leaf(D, &[0, 1, 2, 3]), leaf(Dperp, &[4, 5])],
    },
    Family {
        name: "q-times-circle",
        summary: "(q, cos t + i sin t) in H^2: quaternion line times a unit circle",
        m: 2,
        params: &[],
        domain: || unit_box(5),
        eval: q_times_circle,
        ranks: Some((4, 1)),
        leaves: leaves_q_t,
    },
    Family {
        name: "totally-real-flat",
        summary: "(s, t) on the real axes of the two factors of H^2",
        m: 2,
        params: &[],
        domain: || unit_box(2),
        eval: totally_real_flat,
        ranks: Some((0, 2)),
        leaves: leaves_surface,
    },
    Family {
        name: "totally-real-torus",
        summary: "flat torus (cos s, sin s, cos t + i sin t) across the three factors of H^3",
        m: 3,
        params: &[],
        domain: || unit_box(2),
        eval: totally_real_torus,
        ranks: Some((0, 2)),
        leaves: leaves_surface,
    },
    Family {
        name: "twisted-product",
        summary: "(q exp(i t), t) in H^2: the quaternion line rotated along the real direction",
        m: 2,
        params: &[],
        domain: || unit_box(5),
        eval: twisted_product,
        ranks: Some((4, 1)),
        leaves: leaves_q,
    },
    Family {
        name: "twisted-graph",
        summary: "(q, q a(t) + g(t)) in H^2 with quadratic quaternion curves a, g",
        m: 2,
        params: &TWISTED_PARAMS,
        domain: || unit_box(5),
        eval: twisted_graph,
        ranks: Some((4, 1)),
        leaves: leaves_q,
    },
    Family {
        name: "twisted-graph-wide",
        summary: "(q, q a(t) + g(t), b(t)) in H^3 with quadratic quaternion curves a, g, b",
        m: 3,
        params: &TWISTED_WIDE_PARAMS,
        domain: || unit_box(5),
        eval: twisted_graph_wide,
        ranks: Some((4, 1)),
        leaves: leaves_q,
    },
    Family {
        name: "tilted-plane",
        summary: "plane through 1 and (i + 1')/sqrt2 in H^2; not a CR-submanifold",
        m: 2,
        params: &[],
        domain: || unit_box(2),
        eval: tilted_plane,
        ranks: None,
        leaves: no_leaves,
    },
];

pub fn family(name: &str) -> Option<&'static Family> {
    FAMILIES.iter().find(|f| f.name == name)
}

pub fn builtin_names() -> Vec<&'static str> {
    FAMILIES.iter().map(|f| f.name).collect()
}

/// Default sample grid: 7 points per axis for curves and surfaces, 3 for
/// five-dimensional charts and 2 beyond.
fn default_counts(k: usize) -> Vec<usize> {
    let n = match k {
        0..=2 => 7,
        3..=5 => 3,
        _ => 2,
    };
    vec![n; k]
}

/// The catalog scenario `name` with its default parameters and grid.
pub fn builtin(name: &str) -> Option<ScenarioSpec> {
    let fam = family(name)?;
    let domain = (fam.domain)();
    Some(ScenarioSpec {
        name: fam.name.to_string(),
        ambient_m: fam.m,
        chart: ChartSpec::Builtin {
            family: fam.name.to_string(),
            params: fam.params.iter().map(|(_, v)| *v).collect(),
        },
        grid: GridSpec {
            counts: default_counts(domain.len()),
            margin: 0.25,
        },
        domain,
        declared_ranks: fam.ranks,
        leaf_charts: (fam.leaves)(),
        tolerances: ToleranceOverrides::default(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_family_builds() {
        for name in builtin_names() {
            let spec = builtin(name).unwrap();
            let sub = spec.build().unwrap();
            let y = sub.eval(&sub.sample_points()[0]).unwrap();
            assert_eq!(y.len(), 4 * spec.ambient_m, "{name}");
        }
        assert!(builtin("nope").is_none());
    }

    #[test]
    fn twisted_product_has_the_image_of_the_linear_product() {
        let f = |u: &[f64]| twisted_product(&[], u);
        let v = f(&[0.2, -0.4, 0.1, 0.3, 0.7]);
        assert_eq!(v[4], 0.7);
        assert!(v.rows(5, 3).iter().all(|x| *x == 0.0));
        let norm = v.rows(0, 4).norm();
        assert!((norm - (0.04f64 + 0.16 + 0.01 + 0.09).sqrt()).abs() < 1e-15);
    }
}
