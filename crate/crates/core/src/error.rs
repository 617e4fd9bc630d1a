use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("radius {radius} too large (limit {limit})")]
    RadiusTooLarge { radius: f64, limit: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("malformed interval [{a}, {b}]: {reason}")]
    Interval { a: f64, b: f64, reason: String },

    #[error("rectangle model found only {found} of {wanted} points with t <= {t_max}")]
    ModelTruncation { wanted: usize, found: usize, t_max: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
