use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{chunk_rng, criterion_fires, torus_bigness, CHUNK};
use crate::error::{usage, Result};
use crate::hermitian::{random_psd, HermitianForm};
use crate::scalar::Real;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Counterexample<T: Real> {
    pub index: usize,
    pub alpha: HermitianForm<T>,
    pub beta: HermitianForm<T>,
    pub criterion: T,
    pub margin: T,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct TheoremCheck<T: Real> {
    pub n: usize,
    pub samples: usize,
    pub seed: u64,
    /// Samples on which the criterion was positive beyond tolerance.
    pub criterion_positive: usize,
    pub counterexamples: Vec<Counterexample<T>>,
}

/// Psd pair with independent random ranks; `β` is scaled by `10^U(−3, 1)`.
pub fn sample_nef_pair<T: Real, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> (HermitianForm<T>, HermitianForm<T>) {
    let ra = rng.random_range(1..=n);
    let rb = rng.random_range(1..=n);
    let alpha = random_psd(n, ra, rng);
    let scale = 10f64.powf(rng.random_range(-3.0..1.0));
    let beta = random_psd(n, rb, rng).scale(T::lit(scale));
    (alpha, beta)
}

/// Samples nef pairs and collects every pair where the criterion fires but
/// `α − β` is not positive definite.
pub fn theorem_check<T: Real>(n: usize, samples: usize, seed: u64) -> Result<TheoremCheck<T>> {
    if !(2..=4).contains(&n) {
        return usage(format!("theorem check supports n in 2..=4, got {n}"));
    }
    let nf = T::from_usize_lossy(n);
    let chunks = samples.div_ceil(CHUNK);
    let per_chunk: Vec<(usize, Vec<Counterexample<T>>)> = (0..chunks)
        .into_par_iter()
        .map(|c| -> Result<_> {
            let mut rng = chunk_rng(seed, c);
            let mut fired = 0;
            let mut found = Vec::new();
            for i in c * CHUNK..samples.min((c + 1) * CHUNK) {
                let (alpha, beta) = sample_nef_pair::<T, _>(n, &mut rng);
                let (value, fires) = criterion_fires(&alpha, &beta, nf)?;
                if fires {
                    fired += 1;
                    let b = torus_bigness(&alpha, &beta)?;
                    if !b.big {
                        found.push(Counterexample {
                            index: i,
                            alpha,
                            beta,
                            criterion: value,
                            margin: b.margin,
                        });
                    }
                }
            }
            Ok((fired, found))
        })
        .collect::<Result<_>>()?;
    let criterion_positive = per_chunk.iter().map(|(f, _)| f).sum();
    let counterexamples = per_chunk.into_iter().flat_map(|(_, c)| c).collect();
    Ok(TheoremCheck {
        n,
        samples,
        seed,
        criterion_positive,
        counterexamples,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::{criterion, torus_bigness};

    type H = HermitianForm<f64>;

    #[test]
    fn no_counterexamples_small_run() {
        for n in 2..=4 {
            let r = theorem_check::<f64>(n, 3000, 7).unwrap();
            assert!(
                r.counterexamples.is_empty(),
                "{:?}",
                r.counterexamples.first()
            );
            assert!(r.criterion_positive > 0);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let a = theorem_check::<f64>(2, 2500, 9).unwrap();
        let b = theorem_check::<f64>(2, 2500, 9).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn explicit_instances() {
        let a = H::diag(&[10.0, 10.0]);
        assert!(criterion(&a, &H::identity(2), 2.0).unwrap() > 0.0);
        assert!(torus_bigness(&a, &H::identity(2)).unwrap().big);
        let a = H::diag(&[1.0, 2.0, 3.0]);
        assert!(criterion(&a, &H::zero(3), 3.0).unwrap() > 0.0);
        assert!(torus_bigness(&a, &H::zero(3)).unwrap().big);
    }

    #[test]
    fn rejects_unsupported_dimension() {
        assert!(theorem_check::<f64>(1, 10, 1).is_err());
        assert!(theorem_check::<f64>(5, 10, 1).is_err());
    }
}
