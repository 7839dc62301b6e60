//! Charted submanifolds of flat `H^m` and their first- and second-order
//! extrinsic geometry.
//!
//! Everything is computed from the chart map by finite differences. The
//! ambient connection is the flat directional derivative, so along a chart
//! `∇̄_{∂i} ∂j = ∂i ∂j f`; its tangential part is the induced connection and
//! its normal part the second fundamental form.

mod chart;
pub mod curvature;
mod geometry;
mod jet;

pub use crate::fd::FdConfig;
pub use chart::{grid_points, jacobian, ChartFn, ChartedSubmanifold, LeafChart};
pub use curvature::{christoffel_at, gauss_equation_residual, gauss_residual_at, riemann, Christoffel, RiemannTensor};
pub use geometry::{
    hessian, normal_connection, point_geometry, shape_operator, NormalDerivative, PointGeometry, ShapeOperatorValue,
};
pub use jet::StencilSamples;
