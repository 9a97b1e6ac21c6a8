use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The closed form is not established for the requested parameters.
    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    /// The two pointer states are numerically indistinguishable.
    #[error("degenerate meter basis: overlap {overlap} is within 1e-14 of 1")]
    DegenerateBasis { overlap: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("insufficient cutoff: {0}")]
    InsufficientCutoff(String),

    #[error("cutoff mismatch: {left} vs {right}")]
    CutoffMismatch { left: usize, right: usize },

    #[error("integration failed at t = {t}: {reason}")]
    Integration { t: f64, reason: String },

    #[error("reduction unreliable: leakage {leakage:.3e} exceeds {limit}")]
    ReductionUnreliable { leakage: f64, limit: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit status used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Unsupported(_) | Error::InvalidConfig(_) | Error::Io(_) => 1,
            Error::DegenerateBasis { .. }
            | Error::Numerical(_)
            | Error::InsufficientCutoff(_)
            | Error::CutoffMismatch { .. }
            | Error::Integration { .. }
            | Error::ReductionUnreliable { .. } => 2,
        }
    }
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
