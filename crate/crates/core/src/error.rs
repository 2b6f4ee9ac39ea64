use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("zeta has a pole at s = 1")]
    Pole,

    #[error("no convergence: {0}")]
    Convergence(String),

    #[error("no critical-line zero in window [{lo}, {hi}] (argument count 0)")]
    NoZero { lo: f64, hi: f64 },

    #[error("zero found off the critical line at Re s = {re}")]
    OffCriticalLine { re: String },

    #[error("claim violated: {0}")]
    ClaimViolation(String),

    #[error("truncation: {0}")]
    Truncation(String),

    #[error("overflow: {0}")]
    Overflow(String),

    #[error("domain: {0}")]
    Domain(String),

    #[error("degenerate: {0}")]
    Degenerate(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures of the numerical machinery, as opposed to bad input or I/O.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Pole
                | Error::Convergence(_)
                | Error::NoZero { .. }
                | Error::OffCriticalLine { .. }
                | Error::ClaimViolation(_)
                | Error::Truncation(_)
                | Error::Overflow(_)
                | Error::Domain(_)
                | Error::Degenerate(_)
        )
    }
}
