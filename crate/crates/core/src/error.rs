use alloc::string::String;

use crate::specfun::QuadratureError;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("argument outside the domain of {function}: {detail}")]
    Domain {
        function: &'static str,
        detail: String,
    },
    #[error(transparent)]
    Quadrature(#[from] QuadratureError),
    #[error("probability {value} falls outside [0, 1] by more than rounding slack")]
    ProbabilityOutOfRange { value: f64 },
    #[error("{route_a} and {route_b} disagree: {value_a} vs {value_b}")]
    RouteMismatch {
        route_a: &'static str,
        route_b: &'static str,
        value_a: f64,
        value_b: f64,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::InvalidConfig(msg.into())
    }

    pub(crate) fn domain(function: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            function,
            detail: detail.into(),
        }
    }
}
