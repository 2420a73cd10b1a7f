use thiserror::Error;

/// Failures raised by the gear, strength, mass and efficiency models.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    /// Tooth form or layout cannot exist (e.g. base circle outside tip circle).
    #[error("geometry infeasible: {0}")]
    GeometryInfeasible(String),
    /// A model produced a value outside its physical range (e.g. efficiency <= 0).
    #[error("model out of range: {0}")]
    OutOfRange(String),
    /// Bearing bore requested outside the fitted table range.
    #[error("bearing bore {bore_mm:.3} mm outside fitted range [{min_mm}, {max_mm}] mm")]
    BearingRange { bore_mm: f64, min_mm: f64, max_mm: f64 },
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
}

impl ModelError {
    /// Short stable tag used in reports and failure tallies.
    pub fn tag(&self) -> &'static str {
        match self {
            ModelError::GeometryInfeasible(_) => "geometry",
            ModelError::OutOfRange(_) => "model-range",
            ModelError::BearingRange { .. } => "bearing-range",
            ModelError::InvalidParameter { .. } => "parameter",
        }
    }
}

pub type ModelResult<T> = Result<T, ModelError>;
