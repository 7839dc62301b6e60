use std::fmt;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::crgeom::Distribution;
use crate::error::{GeomError, Result};
use crate::fd::FdConfig;

/// Chart map `u ∈ R^k ↦ f(u) ∈ R^{4m}`.
pub type ChartFn = Arc<dyn Fn(&[f64]) -> DVector<f64> + Send + Sync>;

/// Chart coordinates whose slices (all other coordinates frozen) are leaves
/// of one of the canonical foliations.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LeafChart {
    pub distribution: Distribution,
    pub coords: Vec<usize>,
}

/// A submanifold of `H^m` given by a single chart on an axis-aligned box.
#[derive(Clone)]
pub struct ChartedSubmanifold {
    name: String,
    m: usize,
    domain: Vec<(f64, f64)>,
    eval: ChartFn,
    sample_points: Vec<Vec<f64>>,
    leaf_charts: Vec<LeafChart>,
}

impl fmt::Debug for ChartedSubmanifold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ChartedSubmanifold")
            .field("name", &self.name)
            .field("m", &self.m)
            .field("domain", &self.domain)
            .field("samples", &self.sample_points.len())
            .field("leaf_charts", &self.leaf_charts)
            .finish()
    }
}

impl ChartedSubmanifold {
    pub fn new(name: impl Into<String>, m: usize, domain: Vec<(f64, f64)>, eval: ChartFn) -> Result<Self> {
        if m == 0 {
            return Err(GeomError::InvalidDimension("ambient m must be at least 1".into()));
        }
        if domain.is_empty() || domain.len() > 4 * m {
            return Err(GeomError::InvalidDimension(format!(
                "chart dimension {} must be in 1..={}",
                domain.len(),
                4 * m
            )));
        }
        for &(lo, hi) in &domain {
            if !(lo.is_finite() && hi.is_finite() && lo < hi) {
                return Err(GeomError::Config(format!("invalid domain interval [{lo}, {hi}]")));
            }
        }
        Ok(ChartedSubmanifold {
            name: name.into(),
            m,
            domain,
            eval,
            sample_points: Vec::new(),
            leaf_charts: Vec::new(),
        })
    }

    pub fn with_samples(mut self, points: Vec<Vec<f64>>) -> Result<Self> {
        for p in &points {
            if p.len() != self.k() {
                return Err(GeomError::Shape {
                    expected: self.k(),
                    got: p.len(),
                });
            }
        }
        self.sample_points = points;
        Ok(self)
    }

    pub fn with_grid(self, counts: &[usize], margin: f64) -> Result<Self> {
        let pts = grid_points(&self.domain, counts, margin)?;
        self.with_samples(pts)
    }

    pub fn with_leaf_charts(mut self, leaves: Vec<LeafChart>) -> Result<Self> {
        for leaf in &leaves {
            if leaf.coords.is_empty() || leaf.coords.iter().any(|&c| c >= self.k()) {
                return Err(GeomError::Config(format!(
                    "leaf chart coordinates {:?} out of range for a {}-dimensional chart",
                    leaf.coords,
                    self.k()
                )));
            }
        }
        self.leaf_charts = leaves;
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn ambient_dim(&self) -> usize {
        4 * self.m
    }

    pub fn k(&self) -> usize {
        self.domain.len()
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn sample_points(&self) -> &[Vec<f64>] {
        &self.sample_points
    }

    pub fn leaf_charts(&self) -> &[LeafChart] {
        &self.leaf_charts
    }

    pub fn leaf_chart(&self, which: Distribution) -> Option<&LeafChart> {
        self.leaf_charts.iter().find(|l| l.distribution == which)
    }

    /// Evaluates the chart, rejecting wrong lengths and non-finite output.
    pub fn eval(&self, u: &[f64]) -> Result<DVector<f64>> {
        let y = (self.eval)(u);
        if y.len() != self.ambient_dim() {
            return Err(GeomError::Shape {
                expected: self.ambient_dim(),
                got: y.len(),
            });
        }
        if y.iter().any(|v| !v.is_finite()) {
            return Err(GeomError::NonFinite { point: u.to_vec() });
        }
        Ok(y)
    }

    /// Distance from `u` to the boundary of the chart domain.
    pub fn boundary_distance(&self, u: &[f64]) -> f64 {
        self.domain
            .iter()
            .zip(u)
            .map(|(&(lo, hi), &x)| (x - lo).min(hi - x))
            .fold(f64::INFINITY, f64::min)
    }

    pub fn check_margin(&self, u: &[f64], margin: f64) -> Result<()> {
        if u.len() != self.k() {
            return Err(GeomError::Shape {
                expected: self.k(),
                got: u.len(),
            });
        }
        if self.boundary_distance(u) < margin {
            return Err(GeomError::Margin {
                point: u.to_vec(),
                margin,
            });
        }
        Ok(())
    }

    /// Verifies that every sample point keeps the deepest stencil of `fd`
    /// inside the domain.
    pub fn check_samples(&self, fd: &FdConfig) -> Result<()> {
        for p in &self.sample_points {
            self.check_margin(p, fd.reach())?;
        }
        Ok(())
    }

    /// The slice through `base` in which only `coords` vary.
    pub fn slice(&self, base: &[f64], coords: &[usize]) -> Result<ChartedSubmanifold> {
        self.check_margin(base, 0.0)?;
        let base = base.to_vec();
        let idx = coords.to_vec();
        let domain = coords.iter().map(|&c| self.domain[c]).collect();
        let parent = self.eval.clone();
        let eval: ChartFn = Arc::new(move |s: &[f64]| {
            let mut p = base.clone();
            for (&c, &v) in idx.iter().zip(s) {
                p[c] = v;
            }
            parent(&p)
        });
        ChartedSubmanifold::new(format!("{}/slice{:?}", self.name, coords), self.m, domain, eval)
    }
}

/// Regular grid over the domain shrunk by `margin` on every side; one point
/// per axis sits at the midpoint. Later axes vary fastest.
pub fn grid_points(domain: &[(f64, f64)], counts: &[usize], margin: f64) -> Result<Vec<Vec<f64>>> {
    if counts.len() != domain.len() {
        return Err(GeomError::Shape {
            expected: domain.len(),
            got: counts.len(),
        });
    }
    let mut axes = Vec::with_capacity(domain.len());
    for (&(lo, hi), &n) in domain.iter().zip(counts) {
        if n == 0 {
            return Err(GeomError::Config("grid counts must be positive".into()));
        }
        let (a, b) = (lo + margin, hi - margin);
        if !(margin >= 0.0 && a <= b) {
            return Err(GeomError::Config(format!(
                "margin {margin} leaves no room in [{lo}, {hi}]"
            )));
        }
        let pts: Vec<f64> = if n == 1 {
            vec![0.5 * (a + b)]
        } else {
            (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
        };
        axes.push(pts);
    }
    let mut out = vec![Vec::new()];
    for axis in &axes {
        let mut next = Vec::with_capacity(out.len() * axis.len());
        for prefix in &out {
            for &x in axis {
                let mut p = prefix.clone();
                p.push(x);
                next.push(p);
            }
        }
        out = next;
    }
    Ok(out)
}

/// Jacobian `[∂f/∂u_1 | ... | ∂f/∂u_k]` by central differences.
pub fn jacobian(sub: &ChartedSubmanifold, u: &[f64], fd: &FdConfig) -> Result<DMatrix<f64>> {
    fd.validate()?;
    sub.check_margin(u, fd.first_step)?;
    let stencil = fd.first();
    let mut cols = Vec::with_capacity(sub.k());
    let mut p = u.to_vec();
    for i in 0..sub.k() {
        let col = stencil.derivative(|s| {
            p[i] = u[i] + s;
            sub.eval(&p)
        })?;
        p[i] = u[i];
        cols.push(col);
    }
    Ok(DMatrix::from_columns(&cols))
}
