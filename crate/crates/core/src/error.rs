use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Broad classes used to map failures onto process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Malformed or inconsistent input.
    Spec,
    /// A numeric procedure failed to reach its tolerance or hit a singularity.
    Numeric,
    /// An internal consistency check failed.
    Internal,
}

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not symmetric (deviation {deviation:e})")]
    NotSymmetric { deviation: f64 },

    #[error("matrix is singular")]
    Singular,

    #[error("factorisation check failed: {0}")]
    Factorisation(String),

    #[error("pole at {point:?}")]
    Pole { point: Vec<Complex64> },

    #[error("moment value overflows at j = {j}; use the log-domain evaluator")]
    MomentOverflow { j: usize },

    #[error("invalid moment function: {0}")]
    InvalidMoment(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("series cap of {cap} terms exceeded before the tail bound was met")]
    CapExceeded { cap: usize },

    #[error("too few nonzero coefficients: need {needed}, found {found}")]
    TooFewCoefficients { needed: usize, found: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("every ray was inconclusive")]
    Inconclusive,

    #[error("degenerate probe: {0}")]
    DegenerateProbe(String),

    #[error("not applicable: {0}")]
    NotApplicable(String),

    #[error("spec error at {path}: {message}")]
    Spec { path: String, message: String },

    #[error("internal invariant breached: {0}")]
    Internal(String),
}

impl Error {
    pub fn spec(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Spec {
            path: path.into(),
            message: message.into(),
        }
    }

    pub fn class(&self) -> ErrorClass {
        match self {
            Error::Spec { .. }
            | Error::DimensionMismatch { .. }
            | Error::NotSymmetric { .. }
            | Error::Singular
            | Error::Factorisation(_)
            | Error::InvalidMoment(_)
            | Error::Precondition(_)
            | Error::NotApplicable(_)
            | Error::DegenerateProbe(_) => ErrorClass::Spec,
            Error::Pole { .. }
            | Error::MomentOverflow { .. }
            | Error::Quadrature(_)
            | Error::CapExceeded { .. }
            | Error::TooFewCoefficients { .. }
            | Error::Inconclusive => ErrorClass::Numeric,
            Error::Internal(_) => ErrorClass::Internal,
        }
    }

    /// Stable machine-readable tag for structured error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::NotSymmetric { .. } => "not_symmetric",
            Error::Singular => "singular",
            Error::Factorisation(_) => "factorisation",
            Error::Pole { .. } => "pole",
            Error::MomentOverflow { .. } => "moment_overflow",
            Error::InvalidMoment(_) => "invalid_moment",
            Error::Quadrature(_) => "quadrature",
            Error::CapExceeded { .. } => "cap_exceeded",
            Error::TooFewCoefficients { .. } => "too_few_coefficients",
            Error::Precondition(_) => "precondition",
            Error::Inconclusive => "inconclusive",
            Error::DegenerateProbe(_) => "degenerate_probe",
            Error::NotApplicable(_) => "not_applicable",
            Error::Spec { .. } => "spec",
            Error::Internal(_) => "internal",
        }
    }
}
