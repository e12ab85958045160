//! Error type shared by every module of the lab.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, LabError>;

#[derive(Debug, Error)]
pub enum LabError {
    #[error("rank too small: SU({0}) needs n >= 2 (use the U(1) basis for the Abelian case)")]
    RankTooSmall(usize),

    #[error("rank {requested} exceeds the configured limit of {limit}")]
    RankTooLarge { requested: usize, limit: usize },

    #[error("generators do not close under commutation (residual {0:e})")]
    NonClosure(f64),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite value encountered in {0}")]
    NonFinite(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("derivative evaluation failed at {0}")]
    DerivativeFailure(String),

    #[error("path is not closed (endpoint gap {0:e})")]
    OpenPath(f64),

    #[error("unsupported expansion order {0} (only 1 and 2 are available)")]
    UnsupportedOrder(usize),

    #[error("operation requires an Abelian (U(1)) field")]
    NonAbelianField,

    #[error("2-form is not antisymmetric: |w[{color}][{mu}][{nu}] + w[{color}][{nu}][{mu}]| = {defect:e}")]
    Asymmetry {
        color: usize,
        mu: usize,
        nu: usize,
        defect: f64,
    },

    #[error("patch is not spatial: time varies by {0:e} across the patch")]
    NonSpatialPatch(f64),

    #[error("boundary of the surface does not match the loop (residual {0:e})")]
    OrientationMismatch(f64),

    #[error("convergence study needs at least two strictly increasing resolutions")]
    InsufficientResolutions,

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key `{key}` in section [{section}]")]
    UnknownKey {
        line: usize,
        section: String,
        key: String,
    },

    #[error("value of `{key}` out of range: {message}")]
    Range { key: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LabError {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        LabError::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }
}
