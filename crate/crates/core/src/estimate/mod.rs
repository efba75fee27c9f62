//! Regularization, Gauduchon normalization and the integral estimate
//! `(∫α̃∧γⁿ⁻¹)(∫α̃ⁿ⁻¹∧β_ε) ≥ c_ε/n` with every intermediate term of its proof.

mod classes;
mod pipeline;
mod sweep;

pub use classes::{normalize_gauduchon, regularize, ClassPair};
pub use pipeline::{
    random_log_factor, run_estimate, run_estimate_with_solution, EstimateReport, Gamma,
    IDENTITY_REL, NORMALIZATION_ABS,
};
pub use sweep::{neville_at_zero, sweep_epsilon, SweepReport};
