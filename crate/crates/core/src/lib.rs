//! Numerical geometry of quaternion CR-submanifolds of flat quaternionic
//! space `H^m = R^{4m}`.
//!
//! The crate is layered bottom-up:
//!
//! * [`quatlin`]: the canonical quaternion triple `(J1, J2, J3)` and
//!   orthonormal subspace arithmetic.
//! * [`ambient`]: the flat ambient model and the algebraic curvature tensor of
//!   a quaternion space form of parameter `c`.
//! * [`immersion`]: charted submanifolds, finite-difference derivatives,
//!   induced metric, Christoffel symbols, second fundamental form, shape and
//!   normal-connection operators, intrinsic curvature.
//! * [`crgeom`]: extraction of the distributions `D`, `D⊥` and the normal
//!   splitting `μ ⊕ μ⊥`, together with first-order jets of their projectors.
//! * [`theorems`]: residual-based predicates for the foliation criteria and
//!   the identities behind them, assembled into a [`theorems::VerificationReport`].
//! * [`scenarios`]: the builtin catalog and the scenario file format.
//! * [`oracle`]: independent, slower recomputations used to cross-check the
//!   pipeline.

pub mod ambient;
pub mod crgeom;
pub mod error;
pub mod fd;
pub mod immersion;
pub mod oracle;
pub mod quatlin;
pub mod scenarios;
pub mod theorems;
pub mod tolerances;

pub use ambient::AmbientSpace;
pub use crgeom::{CrDecomposition, Distribution};
pub use error::{GeomError, Result};
pub use immersion::{ChartedSubmanifold, FdConfig, PointGeometry};
pub use quatlin::{Alpha, QuaternionTriple, Subspace};
pub use scenarios::ScenarioSpec;
pub use theorems::{Analysis, AnalysisConfig, PredicateResult, Verdict, VerificationReport};
