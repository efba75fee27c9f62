//! Pointwise algebra of Hermitian (1,1)-forms.
//!
//! A real (1,1)-form `sum A_{jk} i dz_j ^ dz̄_k` is stored as its Hermitian
//! coefficient matrix `A`. Nothing here knows about grids; the torus module
//! applies these operations node by node.

pub mod dense;
mod mixed;
mod sampling;
mod traces;

use std::ops::{Add, Mul, Sub};

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::error::{usage, Error, Result};
use crate::scalar::{fabs, fmax, Real};
use crate::tolerances::positivity_threshold;

pub(crate) use mixed::polarize as mixed_polarize;
pub use mixed::{intersection_number, mixed_discriminant, MAX_DIM};
pub use sampling::{random_hermitian, random_positive_definite, random_psd, seeded_rng, SeededRng};
pub use traces::{
    check_trace_product_inequality, relative_eigenvalues, relative_trace, TraceProductWitness,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Positivity {
    PositiveDefinite,
    PositiveSemidefinite,
    Indefinite,
}

/// Constant real (1,1)-form, i.e. an `n x n` Hermitian coefficient matrix.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    try_from = "ComplexMatrix<T>",
    into = "ComplexMatrix<T>",
    bound(serialize = "T: Real", deserialize = "T: Real")
)]
pub struct HermitianForm<T> {
    dim: usize,
    entries: Vec<Complex<T>>,
}

/// Wire representation: `{"re": [[..]], "im": [[..]]}`, `im` optional.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ComplexMatrix<T> {
    pub re: Vec<Vec<T>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub im: Vec<Vec<T>>,
}

impl<T: Real> TryFrom<ComplexMatrix<T>> for HermitianForm<T> {
    type Error = Error;

    fn try_from(m: ComplexMatrix<T>) -> Result<Self> {
        let n = m.re.len();
        if n == 0 {
            return usage("matrix `re` must be non-empty");
        }
        if m.re.iter().any(|row| row.len() != n) {
            return usage(format!("matrix `re` must be {n}x{n}"));
        }
        if !m.im.is_empty() && (m.im.len() != n || m.im.iter().any(|row| row.len() != n)) {
            return usage(format!("matrix `im` must be {n}x{n} when present"));
        }
        let mut entries = Vec::with_capacity(n * n);
        for j in 0..n {
            for k in 0..n {
                let im = if m.im.is_empty() {
                    T::zero()
                } else {
                    m.im[j][k]
                };
                entries.push(Complex::new(m.re[j][k], im));
            }
        }
        HermitianForm::new(n, entries)
    }
}

impl<T: Real> From<HermitianForm<T>> for ComplexMatrix<T> {
    fn from(h: HermitianForm<T>) -> Self {
        let n = h.dim;
        let re = (0..n)
            .map(|j| (0..n).map(|k| h.get(j, k).re).collect())
            .collect();
        let im: Vec<Vec<T>> = (0..n)
            .map(|j| (0..n).map(|k| h.get(j, k).im).collect())
            .collect();
        let im = if im.iter().flatten().all(|x| *x == T::zero()) {
            Vec::new()
        } else {
            im
        };
        ComplexMatrix { re, im }
    }
}

impl<T: Real> HermitianForm<T> {
    /// Builds a form from row-major entries, replacing `A` by `(A + A*)/2`.
    pub fn new(dim: usize, entries: Vec<Complex<T>>) -> Result<Self> {
        if dim == 0 {
            return usage("form dimension must be positive");
        }
        if entries.len() != dim * dim {
            return usage(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            ));
        }
        Ok(Self::from_entries_symmetrized(dim, entries))
    }

    pub(crate) fn from_entries_symmetrized(dim: usize, mut entries: Vec<Complex<T>>) -> Self {
        let half = T::lit(0.5);
        for j in 0..dim {
            entries[j * dim + j] = Complex::new(entries[j * dim + j].re, T::zero());
            for k in (j + 1)..dim {
                let avg = (entries[j * dim + k] + entries[k * dim + j].conj()) * half;
                entries[j * dim + k] = avg;
                entries[k * dim + j] = avg.conj();
            }
        }
        Self { dim, entries }
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            entries: vec![Complex::zero(); dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        Self {
            dim,
            entries: dense::identity(dim),
        }
    }

    pub fn diag(values: &[T]) -> Self {
        let n = values.len();
        let mut h = Self::zero(n);
        for (j, v) in values.iter().enumerate() {
            h.entries[j * n + j] = Complex::new(*v, T::zero());
        }
        h
    }

    /// Real symmetric form from rows; the lower triangle is averaged with the upper.
    pub fn from_real_rows(rows: &[Vec<T>]) -> Result<Self> {
        let n = rows.len();
        if rows.iter().any(|r| r.len() != n) {
            return usage("rows must form a square matrix");
        }
        let entries = rows
            .iter()
            .flatten()
            .map(|x| Complex::new(*x, T::zero()))
            .collect();
        Self::new(n, entries)
    }

    /// `U diag(values) U*` for a unitary `U` given row-major.
    pub fn from_spectrum(values: &[T], unitary: &[Complex<T>]) -> Self {
        let n = values.len();
        let mut entries = vec![Complex::zero(); n * n];
        for j in 0..n {
            for k in 0..n {
                let mut s = Complex::zero();
                for (l, v) in values.iter().enumerate() {
                    s = s + unitary[j * n + l] * unitary[k * n + l].conj() * *v;
                }
                entries[j * n + k] = s;
            }
        }
        Self::from_entries_symmetrized(n, entries)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn get(&self, j: usize, k: usize) -> Complex<T> {
        self.entries[j * self.dim + k]
    }

    pub fn trace(&self) -> T {
        (0..self.dim).fold(T::zero(), |acc, j| acc + self.entries[j * self.dim + j].re)
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            dim: self.dim,
            entries: self.entries.iter().map(|x| *x * s).collect(),
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |acc, x| fmax(acc, x.norm()))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|x| x.is_zero())
    }

    pub fn eigen(&self) -> (Vec<T>, Vec<Complex<T>>) {
        dense::hermitian_eigen(&self.entries, self.dim)
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<T> {
        self.eigen().0
    }

    pub fn min_eigenvalue(&self) -> T {
        self.eigenvalues()[0]
    }

    pub fn determinant(&self) -> T {
        dense::determinant(&self.entries, self.dim).re
    }

    /// Classification with threshold `1e-10 * max(1, max |eigenvalue|)`.
    pub fn positivity(&self) -> Positivity {
        classify(&self.eigenvalues())
    }

    pub fn is_positive_definite(&self) -> bool {
        self.positivity() == Positivity::PositiveDefinite
    }

    pub fn is_positive_semidefinite(&self) -> bool {
        self.positivity() != Positivity::Indefinite
    }

    /// Ok when positive definite, otherwise a domain error naming the smallest eigenvalue.
    pub fn require_positive_definite(&self, what: &str) -> Result<()> {
        let eig = self.eigenvalues();
        if classify(&eig) == Positivity::PositiveDefinite {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} is not positive definite: smallest eigenvalue {:e}",
                eig[0].to_f64_lossy()
            )))
        }
    }

    pub fn require_positive_semidefinite(&self, what: &str) -> Result<()> {
        let eig = self.eigenvalues();
        if classify(&eig) != Positivity::Indefinite {
            Ok(())
        } else {
            Err(Error::Domain(format!(
                "{what} is not positive semidefinite: smallest eigenvalue {:e}",
                eig[0].to_f64_lossy()
            )))
        }
    }

    pub(crate) fn require_same_dim(&self, other: &Self) -> Result<()> {
        if self.dim == other.dim {
            Ok(())
        } else {
            usage(format!("dimension mismatch: {} vs {}", self.dim, other.dim))
        }
    }

    /// Conversion to another scalar type.
    pub fn cast<U: Real>(&self) -> HermitianForm<U> {
        HermitianForm {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .map(|z| Complex::new(U::lit(z.re.to_f64_lossy()), U::lit(z.im.to_f64_lossy())))
                .collect(),
        }
    }
}

fn classify<T: Real>(eigenvalues: &[T]) -> Positivity {
    let largest = eigenvalues
        .iter()
        .fold(T::zero(), |acc, x| fmax(acc, fabs(*x)));
    let tau = positivity_threshold(largest);
    let min = eigenvalues[0];
    if min >= tau {
        Positivity::PositiveDefinite
    } else if min > -tau {
        Positivity::PositiveSemidefinite
    } else {
        Positivity::Indefinite
    }
}

impl<T: Real> Add for &HermitianForm<T> {
    type Output = HermitianForm<T>;

    fn add(self, rhs: Self) -> HermitianForm<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        HermitianForm {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| *a + *b)
                .collect(),
        }
    }
}

impl<T: Real> Sub for &HermitianForm<T> {
    type Output = HermitianForm<T>;

    fn sub(self, rhs: Self) -> HermitianForm<T> {
        assert_eq!(self.dim, rhs.dim, "dimension mismatch");
        HermitianForm {
            dim: self.dim,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| *a - *b)
                .collect(),
        }
    }
}

impl<T: Real> Mul<T> for &HermitianForm<T> {
    type Output = HermitianForm<T>;

    fn mul(self, s: T) -> HermitianForm<T> {
        self.scale(s)
    }
}

/// Ascending list of relative eigenvalues.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct EigenvalueList<T> {
    values: Vec<T>,
}

impl<T: Real> EigenvalueList<T> {
    pub(crate) fn from_sorted(values: Vec<T>) -> Self {
        Self { values }
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn sum(&self) -> T {
        self.values.iter().fold(T::zero(), |a, b| a + *b)
    }

    pub fn product(&self) -> T {
        self.values.iter().fold(T::one(), |a, b| a * *b)
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constructor_symmetrizes() {
        let h = HermitianForm::new(
            2,
            vec![
                Complex::new(1.0, 0.3),
                Complex::new(2.0, 1.0),
                Complex::new(0.0, 0.0),
                Complex::new(3.0, 0.0),
            ],
        )
        .unwrap();
        assert_eq!(h.get(0, 0), Complex::new(1.0, 0.0));
        assert_eq!(h.get(0, 1), Complex::new(1.0, 0.5));
        assert_eq!(h.get(1, 0), Complex::new(1.0, -0.5));
    }

    #[test]
    fn positivity_classes() {
        assert_eq!(
            HermitianForm::diag(&[1.0, 2.0]).positivity(),
            Positivity::PositiveDefinite
        );
        assert_eq!(
            HermitianForm::diag(&[0.0, 2.0]).positivity(),
            Positivity::PositiveSemidefinite
        );
        assert_eq!(
            HermitianForm::diag(&[1e-12, 2.0]).positivity(),
            Positivity::PositiveSemidefinite
        );
        assert_eq!(
            HermitianForm::diag(&[-1e-3, 2.0]).positivity(),
            Positivity::Indefinite
        );
        assert_eq!(
            HermitianForm::<f64>::zero(3).positivity(),
            Positivity::PositiveSemidefinite
        );
    }

    #[test]
    fn domain_error_names_eigenvalue() {
        let err = HermitianForm::diag(&[-2.0, 1.0])
            .require_positive_definite("base")
            .unwrap_err();
        assert!(err.to_string().contains("-2e0"), "{err}");
    }

    #[test]
    fn json_wire_format() {
        let h: HermitianForm<f64> =
            serde_json::from_str(r#"{"re": [[2, 1], [1, 1]], "im": [[0, 0.5], [-0.5, 0]]}"#)
                .unwrap();
        assert_eq!(h.get(0, 1), Complex::new(1.0, 0.5));
        let back = serde_json::to_string(&h).unwrap();
        assert_eq!(
            back,
            r#"{"re":[[2.0,1.0],[1.0,1.0]],"im":[[0.0,0.5],[-0.5,0.0]]}"#
        );
        assert!(serde_json::from_str::<HermitianForm<f64>>(r#"{"re": [[1, 2]]}"#).is_err());
    }
}
