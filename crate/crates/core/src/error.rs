// Copyright 2026 The semilab Authors
// SPDX-License-Identifier: Apache-2.0

use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-finite entry in {0}")]
    NonFinite(&'static str),

    #[error("matrix dimension must be positive")]
    EmptyMatrix,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid exponent p = {0} (need p >= 1)")]
    InvalidExponent(f64),

    #[error("lambda = {lambda} lies in the spectrum to working precision (condition {condition:e})")]
    SpectrumHit { lambda: Complex64, condition: f64 },

    #[error("quadrature did not converge after {nodes} nodes (relative change {relative_change:e})")]
    QuadratureDivergence { nodes: usize, relative_change: f64 },

    #[error("polynomial is constant")]
    ConstantPolynomial,

    #[error("coefficient overflow while expanding power {0}")]
    CoefficientOverflow(usize),

    #[error("zeta is not a root: division residual {0:e}")]
    NotARoot(f64),

    #[error("phase mismatch: t*alpha = {got}, expected {expected}")]
    PhaseMismatch { got: f64, expected: f64 },

    #[error("contour passes within {0:e} of a singularity of e^z - zeta")]
    ContourTooClose(f64),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("exact enumeration of {n} signs exceeds cap {cap}")]
    EnumerationTooLarge { n: usize, cap: usize },

    #[error("no admissible horizon up to {0} makes the Laplace integrand tail negligible")]
    TailTooFat(f64),

    #[error("series not converged: relative change {0:e} after the last term")]
    SeriesNotConverged(f64),

    #[error("extrapolation chain inapplicable: endpoint plateau rho = {0} >= 1")]
    ChainInapplicable(f64),

    #[error("kernel mass outside the image sum is {0:e}")]
    PeriodizationError(f64),

    #[error("Gaussian domination fails at t = {t}, grid index {index}")]
    DominationFailure { t: f64, index: usize },

    #[error("unknown zoo entry '{0}'")]
    UnknownEntry(String),

    #[error("bad parameters: {0}")]
    BadParams(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("at grid point {index} (value {value}): {source}")]
    AtGridPoint {
        index: usize,
        value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Attaches the grid point at which a sweep failed.
    pub fn at(self, index: usize, value: f64) -> Self {
        match self {
            e @ Error::AtGridPoint { .. } => e,
            e => Error::AtGridPoint {
                index,
                value,
                source: Box::new(e),
            },
        }
    }

    /// The error with any grid-point context stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtGridPoint { source, .. } => source.root(),
            e => e,
        }
    }

    /// True for failures of the numerics (as opposed to bad input).
    pub fn is_numerical(&self) -> bool {
        matches!(
            self.root(),
            Error::SpectrumHit { .. }
                | Error::QuadratureDivergence { .. }
                | Error::CoefficientOverflow(_)
                | Error::NotARoot(_)
                | Error::ContourTooClose(_)
                | Error::TailTooFat(_)
                | Error::SeriesNotConverged(_)
                | Error::ChainInapplicable(_)
                | Error::PeriodizationError(_)
                | Error::DominationFailure { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
