use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the set where the operation is defined.
    #[error("domain error in {op}: {reason}")]
    Domain { op: &'static str, reason: String },

    /// Inputs are individually valid but inconsistent with each other
    /// (mismatched lengths, wrong operator mode, a law breaking its declared bounds).
    #[error("contract violation in {op}: {reason}")]
    Contract { op: &'static str, reason: String },

    #[error("quadrature failure in {op}: {reason}")]
    Quadrature { op: &'static str, reason: String },

    #[error("operation {op} is not supported for {mode} operators")]
    UnsupportedMode { op: &'static str, mode: &'static str },

    #[error("linear algebra failure: {0}")]
    LinearAlgebra(String),

    #[error("solver failure at step {step} (t = {time}): {reason}\n{dump}")]
    Solver {
        step: usize,
        time: f64,
        reason: String,
        dump: String,
    },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("invalid configuration:\n{}", .0.join("\n"))]
    Config(Vec<String>),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn domain(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            op,
            reason: reason.into(),
        }
    }

    pub(crate) fn contract(op: &'static str, reason: impl Into<String>) -> Self {
        Error::Contract {
            op,
            reason: reason.into(),
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
