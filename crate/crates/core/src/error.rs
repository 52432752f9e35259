use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("`{name}` expects {expected} argument(s), got {found} (offset {offset})")]
    Arity { name: String, expected: usize, found: usize, offset: usize },

    #[error("unbound identifier `{0}`")]
    Unbound(String),

    #[error("domain error in {function} at {point}")]
    Domain { function: String, point: String },

    #[error("point ({u}, {v}) lies outside the chart domain")]
    OutOfDomain { u: f64, v: f64 },

    #[error("degenerate metric at ({u}, {v}): EG - F^2 = {det:e}")]
    DegenerateMetric { u: f64, v: f64, det: f64 },

    #[error("ambient space is not a product space")]
    NotProduct,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("patch validation failed: {0}")]
    Validation(String),

    #[error("umbilic point at ({u}, {v}): normalized q = {q:e}")]
    UmbilicPoint { u: f64, v: f64, q: f64 },

    #[error("chart is not conformal at ({u}, {v}): defect {defect:e}")]
    ChartNotConformal { u: f64, v: f64, defect: f64 },

    #[error("skew curvature {q:e} below floor {floor:e} at ({u}, {v})")]
    QBelowFloor { u: f64, v: f64, q: f64, floor: f64 },

    #[error("winding not integer-consistent: {0}")]
    Winding(String),

    #[error("index snap residual {residual:.4} exceeds {limit} at ({u}, {v})")]
    SnapResidual { u: f64, v: f64, residual: f64, limit: f64 },

    #[error("loop around ({u}, {v}) is not isolating: {reason}")]
    NotIsolated { u: f64, v: f64, reason: String },

    #[error("point ({u}, {v}) is not an umbilic")]
    NotUmbilic { u: f64, v: f64 },

    #[error("vertex inconsistency: {0}")]
    Vertex(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    /// Whether the error stems from numerics (as opposed to malformed input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::Domain { .. }
                | Error::DegenerateMetric { .. }
                | Error::UmbilicPoint { .. }
                | Error::ChartNotConformal { .. }
                | Error::QBelowFloor { .. }
                | Error::Winding(_)
                | Error::SnapResidual { .. }
                | Error::NotIsolated { .. }
                | Error::NotUmbilic { .. }
                | Error::Vertex(_)
        )
    }
}
