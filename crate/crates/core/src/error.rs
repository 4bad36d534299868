use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid size {0}: must be a power of two and at least 2")]
    InvalidGrid(usize),

    #[error("support period count must be at least 1")]
    InvalidPeriods,

    #[error("grid or period count mismatch: {0}")]
    Mismatch(String),

    #[error("non-finite value encountered at xi = {xi}")]
    NonFinite { xi: f64 },

    #[error("expected a real-valued function, found imaginary part {imag:e} at grid index {index}")]
    NotReal { index: usize, imag: f64 },

    #[error("filter has no coefficients")]
    EmptyFilter,

    #[error("generator set spans the zero space")]
    EmptySpan,

    #[error("ill-conditioned frame: lower bound {lower:e} is not above {eps:e}")]
    IllConditioned { lower: f64, eps: f64 },

    #[error("generators {i} and {j} are not fusable: fibers independent on measure {measure}")]
    NotFusable { i: usize, j: usize, measure: f64 },

    #[error("generator index {index} out of range for a set of {len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("premise violation: {0}")]
    Premise(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// True for failures of a mathematical precondition, as opposed to
    /// malformed input or I/O.
    pub fn is_precondition(&self) -> bool {
        matches!(
            self,
            Error::EmptySpan
                | Error::IllConditioned { .. }
                | Error::NotFusable { .. }
                | Error::Premise(_)
                | Error::NonFinite { .. }
        )
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
