//! Central finite differences with optional Richardson extrapolation.

use std::ops::{Add, Mul, Sub};

use crate::error::{GeomError, Result};

/// Step sizes for the three kinds of derivative the pipeline takes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FdConfig {
    /// Step for first derivatives of the chart map (the Jacobian).
    pub first_step: f64,
    /// Step for second derivatives of the chart map.
    pub second_step: f64,
    /// Step for differentiating derived fields: metric, projectors,
    /// Christoffel symbols.
    pub field_step: f64,
    /// Combine steps `h` and `h/2` to cancel the `O(h^2)` error term.
    pub richardson: bool,
}

impl Default for FdConfig {
    fn default() -> Self {
        FdConfig::with_base_step(1e-3)
    }
}

impl FdConfig {
    /// First and second derivative steps equal `h`, field steps `10 h`.
    pub fn with_base_step(h: f64) -> Self {
        FdConfig {
            first_step: h,
            second_step: h,
            field_step: 10.0 * h,
            richardson: true,
        }
    }

    /// Plain central differences without extrapolation.
    pub fn plain(first_step: f64, second_step: f64, field_step: f64) -> Self {
        FdConfig {
            first_step,
            second_step,
            field_step,
            richardson: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, h) in [
            ("first_step", self.first_step),
            ("second_step", self.second_step),
            ("field_step", self.field_step),
        ] {
            if !(h.is_finite() && h > 0.0) {
                return Err(GeomError::Config(format!(
                    "finite-difference {name} must be positive and finite, got {h}"
                )));
            }
        }
        Ok(())
    }

    /// Largest chart-coordinate offset reached by the deepest nested stencil
    /// (curvature: a field derivative of a field derivative of the Jacobian).
    pub fn reach(&self) -> f64 {
        2.0 * self.field_step + self.first_step.max(self.second_step)
    }

    pub fn first(&self) -> Stencil {
        Stencil::new(self.first_step, self.richardson)
    }

    pub fn second(&self) -> Stencil {
        Stencil::new(self.second_step, self.richardson)
    }

    pub fn field(&self) -> Stencil {
        Stencil::new(self.field_step, self.richardson)
    }
}

/// A symmetric one-dimensional stencil for first derivatives.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub h: f64,
    pub richardson: bool,
}

impl Stencil {
    pub fn new(h: f64, richardson: bool) -> Self {
        Stencil { h, richardson }
    }

    /// Sample offsets, in the order expected by [`Stencil::combine`].
    pub fn offsets(&self) -> Vec<f64> {
        let h = self.h;
        if self.richardson {
            vec![h, -h, 0.5 * h, -0.5 * h]
        } else {
            vec![h, -h]
        }
    }

    /// First derivative from values at [`Stencil::offsets`].
    pub fn combine<T>(&self, vals: &[T]) -> T
    where
        T: Clone + Sub<Output = T> + Add<Output = T> + Mul<f64, Output = T>,
    {
        let h = self.h;
        let coarse = (vals[0].clone() - vals[1].clone()) * (0.5 / h);
        if !self.richardson {
            return coarse;
        }
        let fine = (vals[2].clone() - vals[3].clone()) * (1.0 / h);
        (fine * 4.0 - coarse) * (1.0 / 3.0)
    }

    /// First derivative of `f` at offset zero.
    pub fn derivative<T, F>(&self, mut f: F) -> Result<T>
    where
        T: Clone + Sub<Output = T> + Add<Output = T> + Mul<f64, Output = T>,
        F: FnMut(f64) -> Result<T>,
    {
        let vals = self.offsets().into_iter().map(&mut f).collect::<Result<Vec<T>>>()?;
        Ok(self.combine(&vals))
    }

    /// Second derivative `d^2/ds dt f(s, t)` at the origin; `diagonal`
    /// selects the pure second difference along a single axis.
    pub fn second_derivative<T, F>(&self, diagonal: bool, mut f: F) -> Result<T>
    where
        T: Clone + Sub<Output = T> + Add<Output = T> + Mul<f64, Output = T>,
        F: FnMut(f64, f64) -> Result<T>,
    {
        let mut at = |h: f64| -> Result<T> {
            if diagonal {
                let p = f(h, 0.0)?;
                let z = f(0.0, 0.0)?;
                let m = f(-h, 0.0)?;
                Ok((p + m - z * 2.0) * (1.0 / (h * h)))
            } else {
                let pp = f(h, h)?;
                let pm = f(h, -h)?;
                let mp = f(-h, h)?;
                let mm = f(-h, -h)?;
                Ok((pp - pm - mp + mm) * (0.25 / (h * h)))
            }
        };
        let coarse = at(self.h)?;
        if !self.richardson {
            return Ok(coarse);
        }
        let fine = at(0.5 * self.h)?;
        Ok((fine * 4.0 - coarse) * (1.0 / 3.0))
    }
}
