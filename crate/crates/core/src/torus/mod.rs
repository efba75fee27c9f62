//! Periodic-grid calculus on the unit-volume flat torus.

mod calculus;
mod field;
mod grid;
pub mod io;

pub(crate) use calculus::hessian_from_spectrum;
pub use calculus::{
    ddbar_closedness_defect, i_ddbar, integrate, integrate_top, top_density, Factor,
};
pub use field::{FormField, Normalization, PotentialField};
pub use grid::TorusGrid;
