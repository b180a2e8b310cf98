use thiserror::Error;

/// Errors raised by the geometry and coordinate-space kernels.
#[derive(Clone, Debug, Error, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A structure or mapping-class description is inconsistent.
    #[error("configuration error: {0}")]
    Config(String),

    /// An iterative solver failed to converge.
    #[error("numerical error: {message} (bracket [{lo:e}, {hi:e}], residuals [{f_lo:e}, {f_hi:e}])")]
    Numerical {
        message: String,
        lo: f64,
        hi: f64,
        f_lo: f64,
        f_hi: f64,
    },

    /// An operation was applied to an incompatible topology.
    #[error("topology error: {0}")]
    Topology(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}

pub(crate) fn config(msg: impl Into<String>) -> Error {
    Error::Config(msg.into())
}
