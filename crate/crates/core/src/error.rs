use thiserror::Error;

use crate::surface::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid critical order {0}: orders must be >= -1")]
    InvalidOrder(i32),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid decomposition: {0}")]
    Validation(ValidationReport),

    #[error("end distance d(r(inf), r'(inf)) is required for a similar pair")]
    MissingEndDistance,

    #[error("modulus ratio {0} <= 1; pass the reciprocal ratio instead")]
    UseReciprocal(f64),

    #[error("singular configuration: {0}")]
    SingularConfiguration(String),

    #[error("map is not orientation preserving at {at} (|mu| = {mu_abs})")]
    NotOrientationPreserving { at: String, mu_abs: f64 },

    #[error("mapped mesh is not orientation preserving: {0}")]
    Orientation(String),

    #[error("finite differences unstable: K(h) = {k_h}, K(h/2) = {k_half}")]
    FiniteDifferenceUnstable { k_h: f64, k_half: f64 },

    #[error("t = {t} is below the threshold time {threshold} for cylinder {cylinder}")]
    BelowThreshold { cylinder: usize, t: f64, threshold: f64 },

    #[error("twist audit failed on cylinder {cylinder}: |arg c1 + arg c2| = {sum} >= 2pi")]
    HomotopyViolation { cylinder: usize, sum: f64 },

    #[error("cross ratio undefined: {0}")]
    UndefinedCrossRatio(&'static str),

    #[error("samples are not strictly increasing near x = {x}, t = {t}")]
    NonMonotone { x: f64, t: f64 },

    #[error("solver did not converge: residual {residual:e} after {iterations} iterations")]
    Solver { residual: f64, iterations: usize },

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
