//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the geometric and analytic routines.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("origin is not strictly interior: row {row} has offset {offset}")]
    OriginNotInterior { row: usize, offset: f64 },

    #[error("polytope is unbounded")]
    Unbounded,

    #[error("dimension {dim} exceeds the design limit {max}")]
    DimensionTooLarge { dim: usize, max: usize },

    #[error("operation is not defined in dimension {dim}")]
    DimensionUnsupported { dim: usize },

    #[error("zero direction vector")]
    ZeroDirection,

    #[error("infeasible constraint system")]
    Infeasible,

    #[error("polytope has empty interior")]
    EmptyInterior,

    #[error("polytope is not origin-symmetric but a symmetric solve was requested")]
    NotSymmetric,

    #[error(
        "solver did not converge after {iterations} iterations (kkt residual {kkt_residual:.3e})"
    )]
    NoConvergence {
        iterations: usize,
        kkt_residual: f64,
        /// Best feasible iterate reached before the cap.
        best: Box<crate::mvie::MvieSolution>,
    },

    #[error("only {found} contact points detected, at least {needed} required")]
    TooFewContacts { found: usize, needed: usize },

    #[error("level set at t = {t} is empty or degenerate")]
    EmptyLevel { t: f64 },

    #[error("quadrature tail did not converge (remaining bound {remaining:.3e})")]
    TailNotConverged { remaining: f64 },

    #[error("point lies on a kink of the exponent; gradient undefined")]
    KinkPoint,

    #[error("all level sets are degenerate; function is not full-dimensional")]
    AllLevelsDegenerate,

    #[error("invalid function spec: {0}")]
    SpecParse(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
