use thiserror::Error;

use crate::container::ContainerError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A point or parameter lies outside the domain of a map.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// One or more phantom disks touch or cross the detector line x2 = 0.
    #[error("phantom disks {offenders:?} intersect the line x2 = 0")]
    SupportIntersectsAxis { offenders: Vec<usize> },

    #[error("inconsistent bistatic records: a ranges over [{min}, {max}]")]
    InconsistentAperture { min: f64, max: f64 },

    #[error("geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error(transparent)]
    Container(#[from] ContainerError),

    #[error("phantom spec: {0}")]
    Json(#[from] serde_json::Error),

    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    /// True for failures caused by the environment (files, malformed containers)
    /// rather than by the caller's parameters.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Container(_))
    }
}
