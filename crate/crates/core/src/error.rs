use thiserror::Error;

pub type Result<T> = std::result::Result<T, GeomError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid dimension: {0}")]
    InvalidDimension(String),

    #[error("shape mismatch: expected length {expected}, got {got}")]
    Shape { expected: usize, got: usize },

    #[error("quaternion structure index {0} is outside 1..=3")]
    AlphaIndex(usize),

    #[error("expected a unit vector, got norm {norm}")]
    NotUnit { norm: f64 },

    #[error("not applicable: {0}")]
    Inapplicable(String),

    #[error("chart point {point:?} is closer than {margin} to the domain boundary")]
    Margin { point: Vec<f64>, margin: f64 },

    #[error("chart evaluation is not finite at {point:?}")]
    NonFinite { point: Vec<f64> },

    #[error("jacobian is rank deficient at {point:?}: smallest singular value {sigma:e}")]
    ImmersionFailure { point: Vec<f64>, sigma: f64 },

    #[error("vector is not normal: tangential residual {0:e}")]
    NotNormal(f64),

    #[error("vector is not tangent: normal residual {0:e}")]
    NotTangent(f64),

    #[error("normal field drifted off the normal bundle: tangential residual {0:e}")]
    NormalDrift(f64),

    #[error("vector is not in the {which} distribution: residual {residual:e}")]
    NotInDistribution { which: &'static str, residual: f64 },

    #[error("rank of {which} varies: {expected} at the first point, {got} at {point:?}")]
    NonConstantRank {
        which: &'static str,
        expected: usize,
        got: usize,
        point: Vec<f64>,
    },

    #[error("invariant subspace has rank {0}, which is not a multiple of 4")]
    NonQuaternionic(usize),

    #[error("D-perp is not totally real: J(D-perp) has tangential residual {residual:e} at {point:?}")]
    NotTotallyReal { residual: f64, point: Vec<f64> },

    #[error("flow left the chart domain at {point:?}")]
    FlowDomain { point: Vec<f64> },

    #[error("configuration error: {0}")]
    Config(String),
}
