//! Quaternionic linear algebra on `R^{4m}`.
//!
//! Coordinates are grouped in blocks of four, one block per quaternion
//! factor, ordered `(1, i, j, k)`. The structure operators act by left
//! multiplication on every block, so `J1 = L_i`, `J2 = L_j`, `J3 = L_k`.

use nalgebra::{DMatrix, DVector};

use crate::error::{GeomError, Result};
use crate::tolerances;

/// Index of one of the three structure operators.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Alpha(u8);

impl Alpha {
    pub const ONE: Alpha = Alpha(1);
    pub const TWO: Alpha = Alpha(2);
    pub const THREE: Alpha = Alpha(3);
    pub const ALL: [Alpha; 3] = [Alpha::ONE, Alpha::TWO, Alpha::THREE];

    pub fn new(index: usize) -> Result<Self> {
        match index {
            1..=3 => Ok(Alpha(index as u8)),
            other => Err(GeomError::AlphaIndex(other)),
        }
    }

    pub fn index(self) -> usize {
        self.0 as usize
    }

    /// The unique `(beta, gamma)` with `(self, beta, gamma)` an even
    /// permutation of `(1, 2, 3)`.
    pub fn cyclic_successors(self) -> (Alpha, Alpha) {
        let (_, b, c) = EVEN_PERMUTATIONS[self.index() - 1];
        (Alpha(b), Alpha(c))
    }
}

/// The even permutations of `(1, 2, 3)`; for each, `J_a J_b = J_c`.
pub const EVEN_PERMUTATIONS: [(u8, u8, u8); 3] = [(1, 2, 3), (2, 3, 1), (3, 1, 2)];

/// Left multiplication tables of `i`, `j`, `k` on the basis `(1, i, j, k)`:
/// entry `[a][col] = (row, sign)` means `L e_col = sign * e_row`.
const LEFT_MUL: [[(usize, f64); 4]; 3] = [
    // i*1 = i, i*i = -1, i*j = k, i*k = -j
    [(1, 1.0), (0, -1.0), (3, 1.0), (2, -1.0)],
    // j*1 = j, j*i = -k, j*j = -1, j*k = i
    [(2, 1.0), (3, -1.0), (0, -1.0), (1, 1.0)],
    // k*1 = k, k*i = j, k*j = -i, k*k = -1
    [(3, 1.0), (2, 1.0), (1, -1.0), (0, -1.0)],
];

/// Canonical local basis `(J1, J2, J3)` of the quaternionic structure on `H^m`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionTriple {
    m: usize,
    ops: [DMatrix<f64>; 3],
}

/// Builds the block-diagonal left-multiplication operators on `H^m`.
pub fn make_quaternion_triple(m: usize) -> Result<QuaternionTriple> {
    if m == 0 {
        return Err(GeomError::InvalidDimension(
            "quaternionic dimension m must be at least 1".into(),
        ));
    }
    let n = 4 * m;
    let ops = [0, 1, 2].map(|a| {
        let mut mat = DMatrix::zeros(n, n);
        for block in 0..m {
            for (col, &(row, sign)) in LEFT_MUL[a].iter().enumerate() {
                mat[(4 * block + row, 4 * block + col)] = sign;
            }
        }
        mat
    });
    Ok(QuaternionTriple { m, ops })
}

impl QuaternionTriple {
    pub fn new(m: usize) -> Result<Self> {
        make_quaternion_triple(m)
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        4 * self.m
    }

    pub fn matrix(&self, alpha: Alpha) -> &DMatrix<f64> {
        &self.ops[alpha.index() - 1]
    }

    pub fn apply(&self, alpha: Alpha, v: &DVector<f64>) -> DVector<f64> {
        self.matrix(alpha) * v
    }
}

/// Hamilton product of quaternions in `(1, i, j, k)` coordinates. Left
/// multiplication by `i`, `j`, `k` is exactly `J1`, `J2`, `J3` on one factor.
pub fn quaternion_product(p: [f64; 4], q: [f64; 4]) -> [f64; 4] {
    let [a1, b1, c1, d1] = p;
    let [a2, b2, c2, d2] = q;
    [
        a1 * a2 - b1 * b2 - c1 * c2 - d1 * d2,
        a1 * b2 + b1 * a2 + c1 * d2 - d1 * c2,
        a1 * c2 - b1 * d2 + c1 * a2 + d1 * b2,
        a1 * d2 + b1 * c2 - c1 * b2 + d1 * a2,
    ]
}

/// Orthonormal basis of a linear subspace of `R^n`, stored as columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Subspace {
    ambient_dim: usize,
    basis: DMatrix<f64>,
    tol: f64,
}

impl Subspace {
    pub fn zero(ambient_dim: usize) -> Self {
        Subspace {
            ambient_dim,
            basis: DMatrix::zeros(ambient_dim, 0),
            tol: 0.0,
        }
    }

    /// Wraps columns that are already orthonormal. Orthonormality is checked.
    pub fn from_orthonormal(basis: DMatrix<f64>, tol: f64) -> Result<Self> {
        let r = basis.ncols();
        let gram = basis.transpose() * &basis;
        let bound = 1e-12_f64.max(10.0 * f64::EPSILON * (basis.nrows() as f64).sqrt());
        let dev = (gram - DMatrix::<f64>::identity(r, r)).amax();
        if dev > bound {
            return Err(GeomError::InvalidDimension(format!(
                "basis is not orthonormal (deviation {dev:e})"
            )));
        }
        Ok(Subspace {
            ambient_dim: basis.nrows(),
            basis,
            tol,
        })
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn rank(&self) -> usize {
        self.basis.ncols()
    }

    pub fn tol(&self) -> f64 {
        self.tol
    }

    pub fn basis(&self) -> &DMatrix<f64> {
        &self.basis
    }

    pub fn vectors(&self) -> Vec<DVector<f64>> {
        self.basis.column_iter().map(|c| c.into_owned()).collect()
    }

    pub fn projector(&self) -> DMatrix<f64> {
        &self.basis * self.basis.transpose()
    }

    pub fn project(&self, v: &DVector<f64>) -> DVector<f64> {
        &self.basis * (self.basis.transpose() * v)
    }

    /// Norm of the component of `v` orthogonal to the subspace.
    pub fn residual(&self, v: &DVector<f64>) -> f64 {
        (v - self.project(v)).norm()
    }

    /// Orthogonal complement of `self` inside `outer`.
    pub fn complement_within(&self, outer: &Subspace, tol: f64) -> Result<Subspace> {
        check_dims(self.ambient_dim, outer.ambient_dim)?;
        let rest: Vec<_> = outer
            .basis
            .column_iter()
            .map(|c| {
                let c = c.into_owned();
                &c - self.project(&c)
            })
            .collect();
        let sub = orthonormalize_with_scale(self.ambient_dim, &rest, tol, 1.0)?;
        Ok(sub)
    }
}

fn check_dims(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(GeomError::Shape { expected: a, got: b })
    }
}

/// Orthonormal basis of the span of `vectors` by twice-iterated modified
/// Gram–Schmidt. A vector whose residual after projection is at most
/// `tol * (largest input norm)` is dropped.
pub fn orthonormalize(ambient_dim: usize, vectors: &[DVector<f64>], tol: f64) -> Result<Subspace> {
    let scale = vectors.iter().map(|v| v.norm()).fold(0.0, f64::max);
    orthonormalize_with_scale(ambient_dim, vectors, tol, scale)
}

fn orthonormalize_with_scale(ambient_dim: usize, vectors: &[DVector<f64>], tol: f64, scale: f64) -> Result<Subspace> {
    let mut accepted: Vec<DVector<f64>> = Vec::new();
    for v in vectors {
        check_dims(ambient_dim, v.len())?;
        if accepted.len() == ambient_dim {
            break;
        }
        let mut w = v.clone();
        for _ in 0..2 {
            for q in &accepted {
                let c = q.dot(&w);
                w.axpy(-c, q, 1.0);
            }
        }
        let norm = w.norm();
        if norm > tol * scale && norm > 0.0 {
            accepted.push(w / norm);
        }
    }
    let basis = if accepted.is_empty() {
        DMatrix::zeros(ambient_dim, 0)
    } else {
        DMatrix::from_columns(&accepted)
    };
    Ok(Subspace {
        ambient_dim,
        basis,
        tol,
    })
}

/// Cosines of the principal angles between `a` and `b`, in decreasing order.
pub fn principal_cosines(a: &Subspace, b: &Subspace) -> Result<Vec<f64>> {
    check_dims(a.ambient_dim, b.ambient_dim)?;
    if a.rank() == 0 || b.rank() == 0 {
        return Ok(Vec::new());
    }
    let cross = a.basis.transpose() * &b.basis;
    let mut s: Vec<f64> = cross.singular_values().iter().map(|x| x.min(1.0)).collect();
    s.sort_by(|x, y| y.total_cmp(x));
    Ok(s)
}

/// Principal angles between `a` and `b`, in increasing order.
pub fn principal_angles(a: &Subspace, b: &Subspace) -> Result<Vec<f64>> {
    Ok(principal_cosines(a, b)?
        .into_iter()
        .map(|c| c.clamp(-1.0, 1.0).acos())
        .collect())
}

/// Intersection of two subspaces: principal vectors of `a` whose principal
/// cosine with `b` is at least `1 - tol`.
pub fn intersect(a: &Subspace, b: &Subspace, tol: f64) -> Result<Subspace> {
    check_dims(a.ambient_dim, b.ambient_dim)?;
    if a.rank() == 0 || b.rank() == 0 {
        return Ok(Subspace::zero(a.ambient_dim));
    }
    let cross = a.basis.transpose() * &b.basis;
    let svd = cross.svd(true, false);
    let u = svd.u.expect("left singular vectors requested");
    let mut dirs: Vec<(f64, DVector<f64>)> = svd
        .singular_values
        .iter()
        .enumerate()
        .filter(|(_, &s)| s >= 1.0 - tol)
        .map(|(i, &s)| (s, &a.basis * u.column(i)))
        .collect();
    dirs.sort_by(|x, y| y.0.total_cmp(&x.0));
    let vecs: Vec<_> = dirs.into_iter().map(|(_, v)| v).collect();
    let mut out = orthonormalize_with_scale(a.ambient_dim, &vecs, 0.5, 1.0)?;
    out.tol = tol;
    Ok(out)
}

/// Image `J_alpha(s)`; `J_alpha` is orthogonal, so the basis stays orthonormal.
pub fn apply_j(triple: &QuaternionTriple, alpha: usize, s: &Subspace) -> Result<Subspace> {
    let alpha = Alpha::new(alpha)?;
    check_dims(triple.dim(), s.ambient_dim)?;
    Ok(Subspace {
        ambient_dim: s.ambient_dim,
        basis: triple.matrix(alpha) * &s.basis,
        tol: s.tol,
    })
}

/// Greedy quaternionic orthonormal frame `{e, J1 e, J2 e, J3 e, ...}` of a
/// J-invariant subspace. At each step the seed is the projection of the
/// coordinate axis with the largest component in what remains (lowest index
/// on ties).
pub fn quaternionic_frame(triple: &QuaternionTriple, d: &Subspace) -> Result<Vec<DVector<f64>>> {
    check_dims(triple.dim(), d.ambient_dim)?;
    if !d.rank().is_multiple_of(4) {
        return Err(GeomError::NonQuaternionic(d.rank()));
    }
    let n = d.ambient_dim;
    let mut frame: Vec<DVector<f64>> = Vec::with_capacity(d.rank());
    let mut remaining = d.clone();
    while remaining.rank() > 0 {
        let proj = remaining.projector();
        let mut best = 0;
        let mut best_norm = -1.0;
        for j in 0..n {
            let norm = proj.column(j).norm();
            if norm > best_norm + 1e-12 {
                best = j;
                best_norm = norm;
            }
        }
        let e: DVector<f64> = proj.column(best).into_owned() / best_norm;
        let quad = [
            e.clone(),
            triple.apply(Alpha::ONE, &e),
            triple.apply(Alpha::TWO, &e),
            triple.apply(Alpha::THREE, &e),
        ];
        frame.extend(quad.iter().cloned());
        let used = Subspace {
            ambient_dim: n,
            basis: DMatrix::from_columns(&quad),
            tol: 0.0,
        };
        remaining = used.complement_within(&remaining, 0.5)?;
    }
    Ok(frame)
}

/// Numerical rank with relative singular-value cutoff.
pub fn numerical_rank(m: &DMatrix<f64>, rel_tol: f64) -> usize {
    if m.nrows() == 0 || m.ncols() == 0 {
        return 0;
    }
    let s = m.singular_values();
    let smax = s.max();
    if smax == 0.0 {
        return 0;
    }
    s.iter().filter(|&&x| x > rel_tol * smax).count()
}

/// Default rank cutoff, relative to the largest singular value.
pub fn rank(m: &DMatrix<f64>) -> usize {
    numerical_rank(m, tolerances::RANK)
}
