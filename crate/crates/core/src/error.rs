use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rotation quaternion is not unit (norm {norm})")]
    NonUnitRotation { norm: f64 },

    #[error("dual quaternion is not unit (residual {residual:e})")]
    NonUnitDualQuaternion { residual: f64 },

    #[error("rotation angle {angle} outside the exponential map domain (< 2π)")]
    AngleOutOfRange { angle: f64 },

    #[error("invalid body parameters: {0}")]
    InvalidBodyParams(String),

    #[error("non-finite state at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("pose-parameter {theta} outside [{min}, {max}]")]
    ThetaOutOfRange { theta: f64, min: f64, max: f64 },

    #[error("spline reference needs at least 4 samples, got {got}")]
    InsufficientSamples { got: usize },

    #[error("sample thetas must be strictly increasing (violated at index {index})")]
    NonMonotonicTheta { index: usize },

    #[error("invalid control gains: {0}")]
    InvalidGains(String),

    #[error("invalid velocity profile: {0}")]
    InvalidProfile(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("unknown preset variant `{0}`")]
    UnknownVariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
