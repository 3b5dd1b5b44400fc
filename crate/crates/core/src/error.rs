use thiserror::Error;

/// Errors produced anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error in {func}: {detail}")]
    Domain { func: &'static str, detail: String },

    #[error("{func} did not converge after {terms} terms (partial value {partial:e})")]
    NonConvergence {
        func: &'static str,
        terms: usize,
        partial: f64,
    },

    #[error("integrand returned a non-finite value {value} at abscissa {at:e}")]
    NonFiniteIntegrand { at: f64, value: f64 },

    #[error("{func} overflows: log-magnitude {log_value:.3} exceeds the f64 range")]
    Overflow { func: &'static str, log_value: f64 },

    #[error("channel matrix is numerically rank deficient")]
    RankDeficient,

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("i/o failure: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(func: &'static str, detail: impl Into<String>) -> Self {
        Error::Domain {
            func,
            detail: detail.into(),
        }
    }

    /// True for failures of an iterative numerical method (as opposed to bad input).
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::NonConvergence { .. }
                | Error::NonFiniteIntegrand { .. }
                | Error::Overflow { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
