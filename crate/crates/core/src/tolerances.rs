//! Default thresholds shared by the library, the CLI and the test suites.

/// Absolute tolerance on a predicate residual for a `true` verdict.
pub const VERDICT: f64 = 1e-6;

/// Residuals up to this value are never reported as a definite `false`;
/// anything between the verdict tolerance and this floor is inconclusive.
/// The effective upper edge of the band is `max(100 * tol, NOISE_FLOOR)`.
pub const NOISE_FLOOR: f64 = 1e-4;

/// Multiplier on the verdict tolerance that bounds the inconclusive band.
pub const HYSTERESIS: f64 = 100.0;

/// Residual bound for the pointwise identities relating connection,
/// second fundamental form and normal connection.
pub const IDENTITY: f64 = 1e-5;

/// Residual bound for curvature comparisons (Gauss equation, leaf curvature).
pub const CURVATURE: f64 = 1e-5;

/// Threshold for the CR conditions: J-invariance of `D`, total reality of `D⊥`.
pub const CR: f64 = 1e-8;

/// Principal-angle threshold: singular values `>= 1 - INTERSECTION` of the
/// projector product count as common directions.
pub const INTERSECTION: f64 = 1e-8;

/// Relative singular-value cutoff used for rank decisions.
pub const RANK: f64 = 1e-8;

/// Smallest singular value of the stacked `J_a w` vectors for them to count
/// as a direct sum.
pub const DIRECT_SUM: f64 = 0.1;

/// Random unit vectors drawn per distribution per sample point.
pub const RANDOM_VECTORS: usize = 20;
