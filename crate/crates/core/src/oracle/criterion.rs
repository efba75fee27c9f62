use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::hermitian::HermitianForm;
use crate::scalar::{factorial, Real};
use crate::tolerances::{inequality_slack, positivity_threshold};

/// `({α}ⁿ, {α}ⁿ⁻¹·{β})` for nef (psd) constant classes.
///
/// Evaluated in the eigenbasis of `α` as `n! Πλ` and `(n−1)! Σ_i (Π_{k≠i} λ_k) β_ii`,
/// which keeps full relative accuracy when `α` is nearly singular and `β` is large.
pub fn criterion_terms<T: Real>(
    alpha: &HermitianForm<T>,
    beta: &HermitianForm<T>,
) -> Result<(T, T)> {
    alpha.require_same_dim(beta)?;
    alpha.require_positive_semidefinite("alpha")?;
    beta.require_positive_semidefinite("beta")?;
    let n = alpha.dim();
    let (lambda, u) = alpha.eigen();
    let mut top = factorial::<T>(n);
    lambda.iter().for_each(|l| top = top * *l);
    let mut mixed = T::zero();
    for i in 0..n {
        // (U* β U)_ii with eigenvectors stored as columns.
        let mut bii = T::zero();
        for j in 0..n {
            for k in 0..n {
                bii = bii + (u[j * n + i].conj() * beta.get(j, k) * u[k * n + i]).re;
            }
        }
        let cofactor = (0..n)
            .filter(|k| *k != i)
            .fold(T::one(), |p, k| p * lambda[k]);
        mixed = mixed + cofactor * bii;
    }
    Ok((top, factorial::<T>(n - 1) * mixed))
}

/// `{α}ⁿ − c {α}ⁿ⁻¹·{β}` for nef (psd) constant classes.
pub fn criterion<T: Real>(alpha: &HermitianForm<T>, beta: &HermitianForm<T>, c: T) -> Result<T> {
    let (top, mixed) = criterion_terms(alpha, beta)?;
    Ok(top - c * mixed)
}

/// Criterion value and whether it is positive beyond `τ_ineq` of its two terms.
pub fn criterion_fires<T: Real>(
    alpha: &HermitianForm<T>,
    beta: &HermitianForm<T>,
    c: T,
) -> Result<(T, bool)> {
    let (top, mixed) = criterion_terms(alpha, beta)?;
    let value = top - c * mixed;
    Ok((value, value > inequality_slack(top, c * mixed)))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Bigness<T> {
    pub big: bool,
    /// Smallest eigenvalue of `α − β`.
    pub margin: T,
}

/// Whether `{α − β}` contains a Kähler current: `α − β` positive definite.
pub fn torus_bigness<T: Real>(
    alpha: &HermitianForm<T>,
    beta: &HermitianForm<T>,
) -> Result<Bigness<T>> {
    alpha.require_same_dim(beta)?;
    let eig = (alpha - beta).eigenvalues();
    let margin = eig[0];
    let scale = eig.iter().fold(T::zero(), |m, v| {
        crate::scalar::fmax(m, crate::scalar::fabs(*v))
    });
    Ok(Bigness {
        big: margin > positivity_threshold(scale),
        margin,
    })
}
