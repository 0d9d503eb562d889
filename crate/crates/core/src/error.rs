use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("discarded block is singular (condition number {cond:.3e} exceeds cap {cap:.1e}); use the limit path")]
    SingularBlock { cond: f64, cap: f64 },

    #[error("projector limit is degenerate: compressed block has a null direction")]
    DegenerateLimit,

    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },

    #[error("unphysical parameters: {0}")]
    Unphysical(String),

    #[error("mode index {index} out of range for a {n_modes}-mode state")]
    IndexOutOfRange { index: usize, n_modes: usize },

    #[error("expected a {expected}-mode state, got {found} modes")]
    WrongModeCount { expected: usize, found: usize },

    #[error("eta must be positive, got {0}")]
    NonPositiveEta(f64),

    #[error("state is not of the form C^-1 (+) C with circulant C: {0}")]
    NotCirculantForm(String),

    #[error("no entanglement threshold for separation {k} at x = {x} below s = {cap:e}")]
    NoThreshold { k: usize, x: f64, cap: f64 },

    #[error("state is not translationally invariant: {0}")]
    NotTranslationInvariant(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Input-validation failures, as opposed to numerical ones.
    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            Error::Dimension(_)
                | Error::Unphysical(_)
                | Error::IndexOutOfRange { .. }
                | Error::WrongModeCount { .. }
                | Error::NonPositiveEta(_)
                | Error::InvalidArgument(_)
                | Error::Parse(_)
                | Error::Io(_)
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
