use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid ellipse: {0}")]
    InvalidEllipse(String),

    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    #[error("invalid filter: {0}")]
    InvalidFilter(String),

    #[error("argument {value} outside [-1, 1]")]
    OutOfDomain { value: f64 },

    #[error("degree {0} is too large")]
    DegreeOverflow(usize),

    #[error("view {view} is missing; complete the coefficient set first")]
    MissingViews { view: usize },

    #[error("invalid matrix request: {0}")]
    InvalidMatrix(String),

    #[error("matrix is not symmetric (asymmetry {asymmetry:e})")]
    NotSymmetric { asymmetry: f64 },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("eigenvalue iteration did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    /// The completion matrices are singular for some frequency unless
    /// `tau < 1 - r / n_sys`.
    #[error(
        "completion systems are singular: need tau < 1 - r/N_sys = {bound} \
         (r = {r}, N_sys = {n_sys}), got tau = {tau}"
    )]
    SingularRegime {
        tau: f64,
        r: usize,
        n_sys: usize,
        bound: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid Slepian parameter: {0}")]
    InvalidSlepian(String),

    #[error("format error: {0}")]
    Format(String),

    #[error("truncated payload: expected {expected} bytes, found {actual}")]
    Truncated { expected: usize, actual: usize },

    #[error("invalid image window: lo = {lo}, hi = {hi}")]
    InvalidWindow { lo: f64, hi: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// True for failures that stem from the numerical preconditions of the
    /// completion step rather than from malformed input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularRegime { .. } | Error::NoConvergence { .. } | Error::NotSymmetric { .. }
        )
    }
}
