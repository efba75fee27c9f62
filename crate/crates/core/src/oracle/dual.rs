use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chunk_rng, CHUNK};
use crate::error::{usage, Result};
use crate::hermitian::{intersection_number, random_positive_definite, HermitianForm};
use crate::scalar::Real;
use crate::tolerances::inequality_slack;

/// Small eigenvalues placed on one eigenvector of `α` by the aligned sampler.
pub const ALIGNED_ETAS: [f64; 4] = [1e-1, 1e-2, 1e-3, 1e-6];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct DualTestOutcome<T: Real> {
    /// `min_γ ∫ α ∧ γⁿ⁻¹` over all sampled metrics.
    pub min_pairing: T,
    pub psef_sampled: bool,
    /// Random metrics plus the eigenvector-aligned ones.
    pub metrics_tested: usize,
    pub minimizer: HermitianForm<T>,
}

fn pairing<T: Real>(alpha: &HermitianForm<T>, gamma: &HermitianForm<T>) -> T {
    let mut f: Vec<&HermitianForm<T>> = vec![alpha];
    f.extend((1..alpha.dim()).map(|_| gamma));
    intersection_number(&f).expect("dimension-checked factors")
}

/// Samples constant metrics `γ` and reports the smallest `∫ α ∧ γⁿ⁻¹`.
///
/// Besides `samples` random metrics, every `U diag(1, …, η, …, 1) U*` with `U`
/// the eigenvectors of `α` and `η ∈ ALIGNED_ETAS` is tried, which exposes any
/// negative eigenvalue of `α`.
pub fn psef_dual_test<T: Real>(
    alpha: &HermitianForm<T>,
    samples: usize,
    seed: u64,
) -> Result<DualTestOutcome<T>> {
    if samples < 1 {
        return usage("dual test needs at least one sample");
    }
    let n = alpha.dim();
    let (_, vectors) = alpha.eigen();
    let mut candidates: Vec<HermitianForm<T>> = Vec::with_capacity(n * ALIGNED_ETAS.len());
    for j in 0..n {
        for eta in ALIGNED_ETAS {
            let mut g = vec![T::one(); n];
            g[j] = T::lit(eta);
            candidates.push(HermitianForm::from_spectrum(&g, &vectors));
        }
    }
    let chunks = samples.div_ceil(CHUNK);
    let random: Vec<(T, HermitianForm<T>)> = (0..chunks)
        .into_par_iter()
        .flat_map_iter(|c| {
            let mut rng = chunk_rng(seed, c);
            let count = CHUNK.min(samples - c * CHUNK);
            (0..count)
                .map(|_| {
                    let g: HermitianForm<T> = random_positive_definite(n, &mut rng);
                    (pairing(alpha, &g), g)
                })
                .collect::<Vec<_>>()
        })
        .collect();
    let aligned = candidates.into_iter().map(|g| (pairing(alpha, &g), g));
    let mut best: Option<(T, HermitianForm<T>)> = None;
    for (p, g) in random.into_iter().chain(aligned) {
        if best.as_ref().is_none_or(|(b, _)| p < *b) {
            best = Some((p, g));
        }
    }
    let (min_pairing, minimizer) = best.expect("at least one sample");
    Ok(DualTestOutcome {
        min_pairing,
        psef_sampled: min_pairing >= -inequality_slack(min_pairing, T::zero()),
        metrics_tested: samples + n * ALIGNED_ETAS.len(),
        minimizer,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{random_psd, seeded_rng};

    type H = HermitianForm<f64>;

    #[test]
    fn psd_alpha_is_psef() {
        let mut rng = seeded_rng(3);
        for rank in 1..=3 {
            let a: H = random_psd(3, rank, &mut rng);
            let out = psef_dual_test(&a, 500, 11).unwrap();
            assert!(out.psef_sampled && out.min_pairing > -1e-9);
        }
    }

    #[test]
    fn indefinite_example_is_detected() {
        let out = psef_dual_test(&H::diag(&[1.0, -0.5]), 10, 1).unwrap();
        assert!(!out.psef_sampled);
        // γ = diag(1, η) aligned with the negative direction gives η − 0.5.
        assert!(out.min_pairing <= 1e-6 - 0.5 + 1e-12);
    }

    #[test]
    fn zero_alpha_pairs_to_zero() {
        let out = psef_dual_test(&H::zero(2), 20, 1).unwrap();
        assert_eq!(out.min_pairing, 0.0);
        assert!(out.psef_sampled);
    }

    #[test]
    fn rejects_zero_samples() {
        assert!(psef_dual_test(&H::identity(2), 0, 1).is_err());
    }
}
