use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Invalid argument or violated precondition.
    #[error("input error: {0}")]
    Input(String),

    /// The requested combination exists in principle but has no implementation
    /// or closed form (e.g. an asymptote the model does not have).
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Iteration failed to certify. Carries the best-effort roots so callers
    /// can still inspect them.
    #[error("numerical failure: {message}")]
    Numerical {
        message: String,
        roots: Vec<Complex64>,
        residuals: Vec<f64>,
    },

    #[error("domain error at index {index}: {message}")]
    Domain { index: usize, message: String },

    #[error("ambiguous branch matching between k = {k_prev} and k = {k_next}; refine the k grid")]
    Ambiguous { k_prev: f64, k_next: f64 },
}

impl Error {
    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn numerical(msg: impl Into<String>) -> Self {
        Error::Numerical {
            message: msg.into(),
            roots: Vec::new(),
            residuals: Vec::new(),
        }
    }

    /// True for errors caused by the caller rather than by the numerics.
    pub fn is_input(&self) -> bool {
        matches!(
            self,
            Error::Input(_) | Error::Unsupported(_) | Error::Domain { .. } | Error::Ambiguous { .. }
        )
    }
}
