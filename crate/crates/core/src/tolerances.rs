//! Numerical thresholds used across the crate.
//!
//! All values are the f64 settings; generic code widens them through
//! [`crate::Real::tol`] for narrower scalars.

use crate::scalar::{fabs, fmax, Real};

/// Relative eigenvalue threshold for positivity classification.
pub const POSITIVITY_REL: f64 = 1e-10;

/// Relative slack allowed when checking a proven inequality.
pub const INEQUALITY_REL: f64 = 1e-9;

/// Accepted overshoot of `max u` above zero after sup-normalization.
pub const NORMALIZATION: f64 = 1e-12;

/// Default max-norm log-residual for Monge-Ampere solves.
pub const RESIDUAL: f64 = 1e-9;

/// Allowed step-to-step increase along an epsilon sweep.
pub const MONOTONE: f64 = 1e-10;

/// `tau_pos = 1e-10 * max(1, max |eigenvalue|)`.
pub fn positivity_threshold<T: Real>(max_abs_eigenvalue: T) -> T {
    T::tol(POSITIVITY_REL) * fmax(T::one(), max_abs_eigenvalue)
}

/// `tau_ineq = 1e-9 * max(1, |lhs|, |rhs|)`.
pub fn inequality_slack<T: Real>(lhs: T, rhs: T) -> T {
    T::tol(INEQUALITY_REL) * fmax(T::one(), fmax(fabs(lhs), fabs(rhs)))
}
