use thiserror::Error;

use crate::point_generation::FeketeSolution;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument violated an operation's precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// Root solving or curve tracking broke down on the set's geometry.
    #[error("degenerate geometry: {0}")]
    DegenerateGeometry(String),
    /// A sampled audit rejected a computed certificate.
    #[error("audit failure: {0}")]
    AuditFailure(String),
    /// A quadrature failed its refinement check.
    #[error("quadrature tolerance exceeded: {0}")]
    Quadrature(String),
    /// The Fekete exchange did not settle within the sweep budget.
    #[error("solver failure after {sweeps} sweeps: {message}")]
    SolverFailure {
        message: String,
        sweeps: usize,
        best: Option<Box<FeketeSolution>>,
    },
    #[error("serialization: {0}")]
    Serialization(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn geometry(msg: impl Into<String>) -> Self {
        Error::DegenerateGeometry(msg.into())
    }
}
