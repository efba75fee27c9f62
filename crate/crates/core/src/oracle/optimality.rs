use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chunk_rng, criterion_fires, sample_nef_pair, torus_bigness, CHUNK};
use crate::error::{usage, Result};
use crate::hermitian::HermitianForm;
use crate::scalar::{fabs, fmax, Real};
use crate::tolerances::positivity_threshold;

/// Grid points per axis of the `(t, δ)` family scan.
pub const FAMILY_STEPS: usize = 100;
/// Random pairs tried after the family scan.
pub const RANDOM_BUDGET: usize = 100_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Witness<T: Real> {
    pub alpha: HermitianForm<T>,
    pub beta: HermitianForm<T>,
    pub criterion_value: T,
    /// Smallest eigenvalue of `α − β` (negative for a witness).
    pub margin: T,
    pub source: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "result", rename_all = "kebab-case")]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub enum OptimalityOutcome<T: Real> {
    Witness(Witness<T>),
    NoWitnessFound { evaluated: usize },
}

impl<T: Real> OptimalityOutcome<T> {
    pub fn witness(&self) -> Option<&Witness<T>> {
        match self {
            OptimalityOutcome::Witness(w) => Some(w),
            OptimalityOutcome::NoWitnessFound { .. } => None,
        }
    }
}

fn check<T: Real>(
    alpha: HermitianForm<T>,
    beta: HermitianForm<T>,
    c: T,
    source: &str,
) -> Result<Option<Witness<T>>> {
    let (value, fires) = criterion_fires(&alpha, &beta, c)?;
    if !fires {
        return Ok(None);
    }
    let b = torus_bigness(&alpha, &beta)?;
    let scale = (&alpha - &beta)
        .eigenvalues()
        .iter()
        .fold(T::zero(), |m, v| fmax(m, fabs(*v)));
    if b.margin < -positivity_threshold(scale) {
        Ok(Some(Witness {
            alpha,
            beta,
            criterion_value: value,
            margin: b.margin,
            source: source.to_string(),
        }))
    } else {
        Ok(None)
    }
}

fn log_space(lo: f64, hi: f64, steps: usize) -> impl Iterator<Item = f64> {
    let (a, b) = (lo.ln(), hi.ln());
    (0..steps).map(move |i| (a + (b - a) * i as f64 / (steps - 1) as f64).exp())
}

/// Looks for a nef pair with `{α}ⁿ − c{α}ⁿ⁻¹·{β} > 0` yet `α − β` not positive
/// definite, first in the family `α = diag(1, t, …, t)`, `β = diag(1 + δ, 0, …, 0)`,
/// then among random pairs.
pub fn optimality_search<T: Real>(n: usize, c: T, seed: u64) -> Result<OptimalityOutcome<T>> {
    if n < 2 {
        return usage("optimality search needs n >= 2");
    }
    if !(c > T::zero()) || c > T::from_usize_lossy(n) {
        return usage("optimality search needs 0 < c <= n");
    }
    let mut evaluated = 0;
    for delta in log_space(1e-4, 1.0, FAMILY_STEPS) {
        for t in log_space(1e-2, 1e2, FAMILY_STEPS) {
            evaluated += 1;
            let mut a = vec![T::lit(t); n];
            a[0] = T::one();
            let mut b = vec![T::zero(); n];
            b[0] = T::lit(1.0 + delta);
            if let Some(w) = check(
                HermitianForm::diag(&a),
                HermitianForm::diag(&b),
                c,
                "family",
            )? {
                return Ok(OptimalityOutcome::Witness(w));
            }
        }
    }
    let chunks = RANDOM_BUDGET.div_ceil(CHUNK);
    let found: Vec<Option<Witness<T>>> = (0..chunks)
        .into_par_iter()
        .map(|k| -> Result<_> {
            let mut rng = chunk_rng(seed, k);
            for _ in k * CHUNK..RANDOM_BUDGET.min((k + 1) * CHUNK) {
                let (alpha, beta) = sample_nef_pair::<T, _>(n, &mut rng);
                if let Some(w) = check(alpha, beta, c, "random")? {
                    return Ok(Some(w));
                }
            }
            Ok(None)
        })
        .collect::<Result<_>>()?;
    evaluated += RANDOM_BUDGET;
    Ok(match found.into_iter().flatten().next() {
        Some(w) => OptimalityOutcome::Witness(w),
        None => OptimalityOutcome::NoWitnessFound { evaluated },
    })
}
