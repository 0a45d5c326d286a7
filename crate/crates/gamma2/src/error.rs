//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by geometry, quadrature, functional and flow evaluations.
#[derive(Debug, Error)]
pub enum Gamma2Error {
    /// A vector or matrix had the wrong dimension for the requested operation.
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A point failed the unit-norm check for membership in the sphere.
    #[error("point is not on the unit sphere: | |sigma| - 1 | = {deviation:.3e} exceeds 1e-12")]
    NotOnSphere { deviation: f64 },

    /// An argument violated a documented precondition.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A z coordinate left the closed interval [-1, 1].
    #[error("z = {z} lies outside [-1, 1]")]
    ZOutOfRange { z: f64 },

    /// An integrand evaluated to a non-finite value at a quadrature node.
    #[error("non-finite integrand value {value} at node {index} (z = {z})")]
    NonFiniteIntegrand { index: usize, z: f64, value: f64 },

    /// A function meant to be strictly positive dipped at or below the floor.
    #[error("positivity violation: min {min:.3e} at node {index} is below the floor {floor:.3e}")]
    PositivityViolation { min: f64, index: usize, floor: f64 },

    /// A ratio whose denominator vanishes (constant function).
    #[error("undefined ratio: {0}")]
    UndefinedRatio(String),

    /// Two computation routes that must agree to quadrature accuracy did not.
    #[error("numerical consistency failure in {context}: |{lhs:.6e} - {rhs:.6e}| exceeds {tolerance:.1e}")]
    NumericalConsistency {
        context: &'static str,
        lhs: f64,
        rhs: f64,
        tolerance: f64,
    },

    /// A spectral decomposition left too much mass above the truncation degree.
    #[error("truncation degree {degree} does not resolve the function: tail error {tail:.3e} exceeds {bound:.3e}")]
    UnresolvedTail { degree: usize, tail: f64, bound: f64 },

    /// The pre-scan of a scalar minimization found more than one local minimum.
    #[error("objective is not unimodal on [{lo}, {hi}]: {count} local minima found in the pre-scan")]
    NotUnimodal { lo: f64, hi: f64, count: usize },

    /// An objective evaluated to a non-finite value during a search.
    #[error("non-finite objective value {value} at t = {at}")]
    NonFiniteValue { at: f64, value: f64 },

    /// Random sampling could not satisfy the positivity floor.
    #[error("could not draw a positive sample after {attempts} attempts (amplitude {amplitude})")]
    SamplingFailed { attempts: usize, amplitude: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Gamma2Error>;
