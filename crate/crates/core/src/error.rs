use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A point or window lies outside the function's domain, or a one-sided
    /// limit was requested on the missing side of an endpoint.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The Riemann–Stieltjes integral is not known to exist, or cannot be
    /// reduced to something this crate can evaluate.
    #[error("integrability error: {0}")]
    Integrability(String),

    /// Adaptive quadrature ran out of subdivisions.
    #[error("accuracy error: {message} (estimated error {est_error:e})")]
    Accuracy { message: String, est_error: f64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("parse error: {0}")]
    Parse(String),

    /// A function definition violates a structural invariant.
    #[error("invalid function definition: {0}")]
    Definition(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn argument(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn integrability(msg: impl Into<String>) -> Self {
        Error::Integrability(msg.into())
    }

    pub(crate) fn precondition(msg: impl Into<String>) -> Self {
        Error::Precondition(msg.into())
    }

    pub(crate) fn definition(msg: impl Into<String>) -> Self {
        Error::Definition(msg.into())
    }
}
