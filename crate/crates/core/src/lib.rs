//! Recovery thresholds and phase experiments for low-rank matrix recovery.
//!
//! The crate evaluates the limiting spectral laws of Gaussian random
//! matrices (quarter-circle, Marcenko-Pastur, semicircle), solves the
//! fixed-point equations that determine the strong / sectional / weak
//! sampling thresholds of nuclear norm minimization and of the PSD trace
//! and feasibility programs, checks the exact null-space recovery
//! conditions on sampled instances, estimates Gaussian mesh widths by
//! Monte Carlo, and runs seeded phase-transition experiments over a
//! (rank fraction, sampling rate) grid.

pub mod conditions;
pub mod matrix_ops;
pub mod measurements;
pub mod phase;
pub mod quadrature;
pub mod rng;
pub mod solvers;
pub mod spectral;
pub mod thresholds;
pub mod width;

use std::fmt;

/// Errors surfaced by the numerical routines.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument fell outside its documented domain.
    Domain(String),
    /// Matrix/vector dimensions do not line up.
    ShapeMismatch(String),
    /// An operation requiring a symmetric matrix got a non-symmetric one.
    NotSymmetric(String),
    /// Required field missing from a `ConditionContext`.
    MissingContext(&'static str),
    /// Requested more measurements than the ambient dimension.
    TooManyMeasurements { m: usize, dim: usize },
    /// Null-space sampling from a fully sampled operator.
    TrivialKernel,
    /// The threshold kind has no fixed-point equation.
    NoDeltaEquation(&'static str),
    /// A stated precondition does not hold for the given input.
    Precondition(String),
    /// CSV text did not parse back into the expected schema.
    CsvParse(String),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(s) => write!(f, "domain error: {s}"),
            Error::ShapeMismatch(s) => write!(f, "shape mismatch: {s}"),
            Error::NotSymmetric(s) => write!(f, "matrix not symmetric: {s}"),
            Error::MissingContext(s) => write!(f, "condition context missing field: {s}"),
            Error::TooManyMeasurements { m, dim } => {
                write!(f, "m = {m} exceeds ambient dimension {dim}")
            }
            Error::TrivialKernel => write!(f, "operator is fully sampled; kernel is trivial"),
            Error::NoDeltaEquation(k) => write!(f, "threshold kind {k} has no delta equation"),
            Error::Precondition(s) => write!(f, "precondition violated: {s}"),
            Error::CsvParse(s) => write!(f, "csv parse error: {s}"),
        }
    }
}

impl std::error::Error for Error {}

pub type Result<T> = std::result::Result<T, Error>;
