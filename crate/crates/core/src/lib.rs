//! Numerical laboratory for the bigness criterion `{α}ⁿ − n{α}ⁿ⁻¹·{β} > 0`
//! on flat complex tori.
//!
//! Layers, bottom-up:
//!
//! * [`hermitian`]: constant (1,1)-forms, relative traces and eigenvalues,
//!   mixed discriminants and intersection numbers.
//! * [`torus`]: periodic grids on the unit-volume torus, spectral `i∂∂̄`,
//!   top-degree quadrature, `∂∂̄`-closedness defects.
//! * [`monge_ampere`]: damped Newton-Krylov solver for
//!   `(background + i∂∂̄u)ⁿ = C · density`.
//! * [`estimate`]: regularization, Gauduchon normalization, and the integral
//!   estimate `(∫α̃∧γⁿ⁻¹)(∫α̃ⁿ⁻¹∧β_ε) ≥ c_ε/n` with all intermediate terms.
//! * [`oracle`]: class-level bigness checks with exact torus oracles.
//! * [`cli`]: scenario files, reports and the `bigness-lab` entry point.
//!
//! All numerics are generic over [`Real`] (`f32` or `f64`); the `*64`
//! aliases below are what the CLI and the acceptance suite use.

// `!(x > 0)` deliberately rejects NaN along with non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod error;
pub mod estimate;
pub mod hermitian;
pub mod monge_ampere;
pub mod oracle;
pub mod scalar;
pub mod tolerances;
pub mod torus;

pub use error::{Error, Result};
pub use scalar::Real;

pub type HermitianForm64 = hermitian::HermitianForm<f64>;
pub type HermitianForm32 = hermitian::HermitianForm<f32>;
pub type TorusGrid64 = torus::TorusGrid<f64>;
pub type PotentialField64 = torus::PotentialField<f64>;
pub type FormField64 = torus::FormField<f64>;
pub type SolverConfig64 = monge_ampere::SolverConfig<f64>;
pub type SolveResult64 = monge_ampere::SolveResult<f64>;
pub type EstimateReport64 = estimate::EstimateReport<f64>;
pub type ClassPair64 = estimate::ClassPair<f64>;
