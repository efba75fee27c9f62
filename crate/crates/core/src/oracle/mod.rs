//! Class-level checks of the bigness criterion on the torus, where a
//! constant class `{α − β}` contains a Kähler current exactly when `α − β`
//! is positive definite.

mod criterion;
mod dual;
mod optimality;
mod theorem;

pub use criterion::{criterion, criterion_fires, criterion_terms, torus_bigness, Bigness};
pub use dual::{psef_dual_test, DualTestOutcome, ALIGNED_ETAS};
pub use optimality::{optimality_search, OptimalityOutcome, Witness, FAMILY_STEPS, RANDOM_BUDGET};
pub use theorem::{sample_nef_pair, theorem_check, Counterexample, TheoremCheck};

/// Samples per independently seeded stream in parallel sampling loops.
pub(crate) const CHUNK: usize = 1024;

/// Generator for chunk `index` of a seeded run; chunks are independent streams.
pub(crate) fn chunk_rng(seed: u64, index: usize) -> crate::hermitian::SeededRng {
    let mut rng = crate::hermitian::seeded_rng(seed);
    rng.set_stream(index as u64);
    rng
}
