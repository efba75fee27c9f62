use num_complex::Complex;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use super::HermitianForm;
use crate::scalar::Real;
use crate::tolerances::POSITIVITY_REL;

/// Generator used for every seeded experiment.
pub type SeededRng = ChaCha8Rng;

pub fn seeded_rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn complex_gaussian<T: Real, R: Rng + ?Sized>(rng: &mut R) -> Complex<T> {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    Complex::new(T::lit(re * s), T::lit(im * s))
}

/// `G G*` for an `n x rank` complex Gaussian `G`; `rank == n` is a.s. positive definite.
pub fn random_psd<T: Real, R: Rng + ?Sized>(
    n: usize,
    rank: usize,
    rng: &mut R,
) -> HermitianForm<T> {
    let g: Vec<Complex<T>> = (0..n * rank).map(|_| complex_gaussian(rng)).collect();
    let mut entries = vec![Complex::new(T::zero(), T::zero()); n * n];
    for j in 0..n {
        for k in 0..n {
            let mut s = Complex::new(T::zero(), T::zero());
            for l in 0..rank {
                s = s + g[j * rank + l] * g[k * rank + l].conj();
            }
            entries[j * n + k] = s;
        }
    }
    HermitianForm::from_entries_symmetrized(n, entries)
}

/// `G G* + tau_pos I` with standard complex Gaussian `G`.
pub fn random_positive_definite<T: Real, R: Rng + ?Sized>(
    n: usize,
    rng: &mut R,
) -> HermitianForm<T> {
    let g = random_psd(n, n, rng);
    &g + &HermitianForm::identity(n).scale(T::lit(POSITIVITY_REL))
}

/// Hermitian form with independent Gaussian entries (any signature).
pub fn random_hermitian<T: Real, R: Rng + ?Sized>(n: usize, rng: &mut R) -> HermitianForm<T> {
    let entries = (0..n * n).map(|_| complex_gaussian(rng)).collect();
    HermitianForm::from_entries_symmetrized(n, entries)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_sampling_is_reproducible() {
        let a: HermitianForm<f64> = random_positive_definite(3, &mut seeded_rng(5));
        let b: HermitianForm<f64> = random_positive_definite(3, &mut seeded_rng(5));
        assert_eq!(a, b);
        assert!(a.is_positive_definite());
    }

    #[test]
    fn rank_deficient_psd_is_semidefinite() {
        let mut rng = seeded_rng(1);
        for _ in 0..50 {
            let a: HermitianForm<f64> = random_psd(3, 1, &mut rng);
            assert!(a.is_positive_semidefinite());
            assert!(!a.is_positive_definite());
        }
    }
}
