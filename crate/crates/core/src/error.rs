//! Error types, one enum per module plus a crate-level wrapper that knows
//! which class (configuration vs numerical) a failure belongs to.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("point lies outside the closed domain")]
    OutsideDomain,
    #[error("boundary start with an outgoing velocity")]
    OutgoingAtBoundary,
    #[error("non-finite coordinate in input")]
    NonFinite,
    #[error("chord length {0:e} is below the grazing floor")]
    GrazingUnderflow(f64),
    #[error("(x, v) is within {0:e} of a reflection-count boundary")]
    OnRegionBoundary(f64),
    #[error("reflection budget of {0} exceeded")]
    TooManyReflections(u64),
    #[error("operation not supported for this domain: {0}")]
    Unsupported(&'static str),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum StableError {
    #[error("invalid stable parameters: {0}")]
    InvalidParams(String),
    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OperatorError {
    #[error("invalid operator configuration: {0}")]
    InvalidConfig(String),
    #[error("test function violates the Neumann condition (max |grad psi . n| = {0:e})")]
    NeumannViolation(f64),
    #[error("quadrature did not converge: {0}")]
    QuadratureNotConverged(String),
    #[error("kernel evaluated at coincident points")]
    CoincidentPoints,
    #[error("negative density value {value} at lattice index {index}")]
    NegativeDensity { index: usize, value: f64 },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum KineticError {
    #[error("invalid kinetic parameters: {0}")]
    InvalidParams(String),
    #[error("initial density is not supported inside the domain")]
    InvalidSupport,
    #[error("transport step too large for particle {0}")]
    StepTooLarge(usize),
    #[error("need at least {needed} live particles, got {got}")]
    TooFewSamples { needed: usize, got: usize },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Stable(#[from] StableError),
    #[error(transparent)]
    Macro(#[from] MacroError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MacroError {
    #[error("invalid heat problem: {0}")]
    InvalidProblem(String),
    #[error("operator assembly failed: {0}")]
    AssemblyFailed(String),
    #[error("linear solve failed: {0}")]
    LinearSolveFailed(String),
    #[error(transparent)]
    Operator(#[from] OperatorError),
}

/// Coarse failure class, used by front-ends to pick exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    /// Bad parameters supplied by the caller.
    Config,
    /// A numerical routine could not produce a trustworthy answer.
    Numeric,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Stable(#[from] StableError),
    #[error(transparent)]
    Operator(#[from] OperatorError),
    #[error(transparent)]
    Kinetic(#[from] KineticError),
    #[error(transparent)]
    Macro(#[from] MacroError),
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        use ErrorClass::*;
        match self {
            Error::Geometry(e) => match e {
                GeometryError::DimensionMismatch { .. }
                | GeometryError::OutsideDomain
                | GeometryError::OutgoingAtBoundary
                | GeometryError::NonFinite
                | GeometryError::Unsupported(_) => Config,
                _ => Numeric,
            },
            Error::Stable(StableError::InvalidParams(_)) => Config,
            Error::Stable(_) => Numeric,
            Error::Operator(OperatorError::InvalidConfig(_)) => Config,
            Error::Operator(OperatorError::NeumannViolation(_)) => Config,
            Error::Operator(_) => Numeric,
            Error::Kinetic(KineticError::InvalidParams(_) | KineticError::InvalidSupport) => Config,
            Error::Kinetic(_) => Numeric,
            Error::Macro(MacroError::InvalidProblem(_)) => Config,
            Error::Macro(_) => Numeric,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
