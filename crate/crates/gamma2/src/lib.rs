//! Numerical toolkit for functional inequalities on the unit sphere S^{d-1}
//! restricted to positive antipodally symmetric functions (equivalently,
//! positive functions on real projective space).
//!
//! The crate evaluates the Gamma_2 functional, Fisher information, entropy
//! and the associated Rayleigh ratios; reproduces the closed-form upper and
//! lower bounds for the optimal Gamma_2 and log-Sobolev constants of the
//! symmetric class (for S², the Gamma_2 constant lies in [5.5, 5.739]); runs
//! spectral heat flow on S² with its dissipation identities; and checks the
//! algebraic machinery behind the lower bound as executable identities.

// Comparisons spelled `!(x > 0.0)` are deliberate throughout: unlike
// `x <= 0.0` they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod error;
pub mod families;
pub mod functionals;
pub mod heatflow;
pub mod poly;
pub mod quadrature;
pub mod sphere;
pub mod verify;

pub use error::{Gamma2Error, Result};
