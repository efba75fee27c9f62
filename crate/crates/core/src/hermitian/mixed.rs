use std::cmp::Ordering;

use num_complex::Complex;
use num_traits::Zero;

use super::{dense, HermitianForm};
use crate::error::{usage, Result};
use crate::scalar::{factorial, Real};

/// Largest supported dimension; polarization costs `2^n` determinants.
pub const MAX_DIM: usize = 8;

/// Mixed discriminant `D(A_1, ..., A_n)`, normalized so `D(A, ..., A) = det A`.
///
/// Inclusion-exclusion over subsets:
/// `n! D = sum_S (-1)^(n-|S|) det(sum_{i in S} A_i)`.
/// Arguments are put in a canonical order first, so the result is bitwise
/// symmetric under permutations.
pub fn mixed_discriminant<T: Real>(forms: &[&HermitianForm<T>]) -> Result<T> {
    let n = forms.len();
    if n == 0 {
        return usage("mixed discriminant needs at least one form");
    }
    if n > MAX_DIM {
        return usage(format!(
            "mixed discriminant limited to n <= {MAX_DIM}, got {n}"
        ));
    }
    if let Some(bad) = forms.iter().find(|f| f.dim() != n) {
        return usage(format!(
            "mixed discriminant of {n} forms needs dimension {n}, got {}",
            bad.dim()
        ));
    }
    let mut ordered: Vec<&[Complex<T>]> = forms.iter().map(|f| f.entries()).collect();
    ordered.sort_by(|a, b| canonical_cmp(a, b));
    Ok(polarize(&ordered, n))
}

pub(crate) fn polarize<T: Real>(mats: &[&[Complex<T>]], n: usize) -> T {
    let mut acc = T::zero();
    let mut buf = vec![Complex::<T>::zero(); n * n];
    for mask in 1u32..(1u32 << n) {
        buf.iter_mut().for_each(|x| *x = Complex::zero());
        for (i, m) in mats.iter().enumerate() {
            if mask & (1 << i) != 0 {
                for (b, x) in buf.iter_mut().zip(m.iter()) {
                    *b = *b + *x;
                }
            }
        }
        let det = dense::determinant(&buf, n).re;
        if (n as u32 - mask.count_ones()).is_multiple_of(2) {
            acc = acc + det;
        } else {
            acc = acc - det;
        }
    }
    acc / factorial::<T>(n)
}

fn canonical_cmp<T: Real>(a: &[Complex<T>], b: &[Complex<T>]) -> Ordering {
    for (x, y) in a.iter().zip(b) {
        let o =
            x.re.to_f64_lossy()
                .total_cmp(&y.re.to_f64_lossy())
                .then(x.im.to_f64_lossy().total_cmp(&y.im.to_f64_lossy()));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// `∫ A_1 ^ ... ^ A_n` for constant forms on the unit-volume torus, `n! D(A_1..A_n)`.
pub fn intersection_number<T: Real>(factors: &[&HermitianForm<T>]) -> Result<T> {
    Ok(factorial::<T>(factors.len()) * mixed_discriminant(factors)?)
}
