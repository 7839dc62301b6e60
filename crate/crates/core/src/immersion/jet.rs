use std::ops::{Add, Mul, Sub};

use crate::error::Result;
use crate::fd::Stencil;

/// Values of some per-point quantity at a chart point and at the stencil
/// offsets along every chart axis, ready for differentiation of anything
/// that depends linearly on a selected part of it.
#[derive(Debug, Clone)]
pub struct StencilSamples<T> {
    pub center: T,
    pub axes: Vec<Vec<T>>,
    pub stencil: Stencil,
}

impl<T> StencilSamples<T> {
    pub fn collect<F>(u: &[f64], stencil: Stencil, mut f: F) -> Result<Self>
    where
        F: FnMut(&[f64]) -> Result<T>,
    {
        let center = f(u)?;
        let mut axes = Vec::with_capacity(u.len());
        let mut p = u.to_vec();
        for i in 0..u.len() {
            let mut vals = Vec::new();
            for off in stencil.offsets() {
                p[i] = u[i] + off;
                vals.push(f(&p)?);
            }
            p[i] = u[i];
            axes.push(vals);
        }
        Ok(StencilSamples { center, axes, stencil })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    /// Derivative along chart axis `axis` of `select(sample)`.
    pub fn derivative<M, S>(&self, axis: usize, select: S) -> M
    where
        S: Fn(&T) -> M,
        M: Clone + Sub<Output = M> + Add<Output = M> + Mul<f64, Output = M>,
    {
        let vals: Vec<M> = self.axes[axis].iter().map(&select).collect();
        self.stencil.combine(&vals)
    }

    /// Derivatives along every chart axis.
    pub fn gradient<M, S>(&self, select: S) -> Vec<M>
    where
        S: Fn(&T) -> M,
        M: Clone + Sub<Output = M> + Add<Output = M> + Mul<f64, Output = M>,
    {
        (0..self.dim()).map(|i| self.derivative(i, &select)).collect()
    }
}
