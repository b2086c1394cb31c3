use thiserror::Error;

pub type Result<T> = std::result::Result<T, LnlsError>;

#[derive(Debug, Error)]
pub enum LnlsError {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two operands live on different lattices or have incompatible sizes.
    #[error("shape error: {0}")]
    Shape(String),

    /// A numerical self-check (quadrature, reference solver) did not converge.
    #[error("accuracy error: {0}")]
    Accuracy(String),

    /// An explicit integrator blew up.
    #[error("instability: {0}")]
    Instability(String),

    /// Malformed persisted data.
    #[error("format error: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl LnlsError {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        LnlsError::Domain(msg.into())
    }

    pub(crate) fn shape(msg: impl Into<String>) -> Self {
        LnlsError::Shape(msg.into())
    }

    /// True for errors caused by numerical failure rather than bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(self, LnlsError::Accuracy(_) | LnlsError::Instability(_))
    }
}
