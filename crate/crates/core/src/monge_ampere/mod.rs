//! Damped Newton-Krylov solver for complex Monge-Ampère equations on the torus.
//!
//! Solves `(B + i∂∂̄u)ⁿ = C · density · dV` where `B` is a positive background
//! form field and `dV` the unit volume form. Pointwise this reads
//! `n! det(B + i∂∂̄u) = C · density`; integrating both sides forces
//! `C = ∫Bⁿ / ∫density` because `∫(B + i∂∂̄u)ⁿ` does not depend on `u`.

mod krylov;
mod solver;

pub use solver::{ma_residual, solve_ma, Residual, SolveResult, SolveSummary, SolverConfig};
