use std::sync::Arc;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::TorusGrid;
use crate::error::{usage, Result};
use crate::hermitian::HermitianForm;
use crate::scalar::{fmax, Real};
use crate::tolerances::NORMALIZATION;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Normalization {
    Raw,
    MeanZero,
    SupZero,
}

/// Real periodic scalar field on a torus grid.
#[derive(Clone, Debug)]
pub struct PotentialField<T: Real> {
    grid: Arc<TorusGrid<T>>,
    values: Vec<T>,
    normalization: Normalization,
}

impl<T: Real> PotentialField<T> {
    pub fn new(grid: Arc<TorusGrid<T>>, values: Vec<T>) -> Result<Self> {
        if values.len() != grid.nodes() {
            return usage(format!(
                "field has {} values, grid has {} nodes",
                values.len(),
                grid.nodes()
            ));
        }
        Ok(Self {
            grid,
            values,
            normalization: Normalization::Raw,
        })
    }

    pub fn zeros(grid: Arc<TorusGrid<T>>) -> Self {
        let values = vec![T::zero(); grid.nodes()];
        Self {
            grid,
            values,
            normalization: Normalization::Raw,
        }
    }

    /// Samples `f` at node coordinates `(x_1, y_1, ..., x_n, y_n)`.
    pub fn from_fn(grid: Arc<TorusGrid<T>>, f: impl Fn(&[T]) -> T) -> Self {
        let values = (0..grid.nodes()).map(|i| f(&grid.coords(i))).collect();
        Self {
            grid,
            values,
            normalization: Normalization::Raw,
        }
    }

    pub fn grid(&self) -> &Arc<TorusGrid<T>> {
        &self.grid
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn normalization(&self) -> Normalization {
        self.normalization
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn max(&self) -> T {
        self.values
            .iter()
            .fold(T::neg_infinity(), |a, b| fmax(a, *b))
    }

    pub fn mean(&self) -> T {
        self.grid.mean(&self.values)
    }

    pub fn shifted(&self, c: T) -> Self {
        Self {
            grid: self.grid.clone(),
            values: self.values.iter().map(|v| *v + c).collect(),
            normalization: Normalization::Raw,
        }
    }

    pub fn with_mean_zero(&self) -> Self {
        let mut out = self.shifted(-self.mean());
        out.normalization = Normalization::MeanZero;
        out
    }

    /// Shifts so that the maximum over nodes is zero.
    pub fn with_sup_zero(&self) -> Self {
        let mut out = self.shifted(-self.max());
        debug_assert!(out.max() <= T::lit(NORMALIZATION));
        out.normalization = Normalization::SupZero;
        out
    }

    pub(crate) fn with_tag(mut self, normalization: Normalization) -> Self {
        self.normalization = normalization;
        self
    }

    /// `a·self + b·other`.
    pub fn combine(&self, a: T, other: &Self, b: T) -> Result<Self> {
        if *self.grid != *other.grid {
            return usage("fields live on different grids");
        }
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(x, y)| a * *x + b * *y)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            values,
            normalization: Normalization::Raw,
        })
    }
}

/// Field of Hermitian forms, one per grid node.
#[derive(Clone, Debug)]
pub struct FormField<T: Real> {
    grid: Arc<TorusGrid<T>>,
    dim: usize,
    entries: Vec<Complex<T>>,
}

impl<T: Real> FormField<T> {
    pub fn constant(grid: Arc<TorusGrid<T>>, form: &HermitianForm<T>) -> Result<Self> {
        if form.dim() != grid.complex_dim() {
            return usage(format!(
                "form of dimension {} on a torus of complex dimension {}",
                form.dim(),
                grid.complex_dim()
            ));
        }
        let mut entries = Vec::with_capacity(grid.nodes() * form.dim() * form.dim());
        for _ in 0..grid.nodes() {
            entries.extend_from_slice(form.entries());
        }
        Ok(Self {
            dim: form.dim(),
            grid,
            entries,
        })
    }

    /// Builds from raw per-node row-major entries; each node is symmetrized.
    pub fn from_entries(grid: Arc<TorusGrid<T>>, mut entries: Vec<Complex<T>>) -> Result<Self> {
        let n = grid.complex_dim();
        if entries.len() != grid.nodes() * n * n {
            return usage("form field payload does not match grid");
        }
        for chunk in entries.chunks_mut(n * n) {
            let h = HermitianForm::from_entries_symmetrized(n, chunk.to_vec());
            chunk.copy_from_slice(h.entries());
        }
        Ok(Self {
            grid,
            dim: n,
            entries,
        })
    }

    /// Pointwise `scale(x) · form`.
    pub fn conformal(
        grid: Arc<TorusGrid<T>>,
        form: &HermitianForm<T>,
        scale: &[T],
    ) -> Result<Self> {
        if scale.len() != grid.nodes() {
            return usage("conformal factor does not match grid");
        }
        let mut f = Self::constant(grid, form)?;
        let nn = f.dim * f.dim;
        for (chunk, s) in f.entries.chunks_mut(nn).zip(scale) {
            chunk.iter_mut().for_each(|x| *x = *x * *s);
        }
        Ok(f)
    }

    pub(crate) fn from_parts(grid: Arc<TorusGrid<T>>, entries: Vec<Complex<T>>) -> Self {
        let dim = grid.complex_dim();
        debug_assert_eq!(entries.len(), grid.nodes() * dim * dim);
        Self { grid, dim, entries }
    }

    pub fn grid(&self) -> &Arc<TorusGrid<T>> {
        &self.grid
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entries(&self) -> &[Complex<T>] {
        &self.entries
    }

    pub fn node_entries(&self, node: usize) -> &[Complex<T>] {
        let nn = self.dim * self.dim;
        &self.entries[node * nn..(node + 1) * nn]
    }

    pub fn node(&self, node: usize) -> HermitianForm<T> {
        HermitianForm::from_entries_symmetrized(self.dim, self.node_entries(node).to_vec())
    }

    /// Entry `(j, k)` over all nodes.
    pub fn component(&self, j: usize, k: usize) -> Vec<Complex<T>> {
        let nn = self.dim * self.dim;
        self.entries
            .chunks(nn)
            .map(|c| c[j * self.dim + k])
            .collect()
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        if *self.grid != *other.grid {
            return usage("fields live on different grids");
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| *a + *b)
            .collect();
        Ok(Self {
            grid: self.grid.clone(),
            dim: self.dim,
            entries,
        })
    }

    pub fn add_constant(&self, form: &HermitianForm<T>) -> Result<Self> {
        if form.dim() != self.dim {
            return usage("dimension mismatch");
        }
        let nn = self.dim * self.dim;
        let mut entries = self.entries.clone();
        for chunk in entries.chunks_mut(nn) {
            for (x, c) in chunk.iter_mut().zip(form.entries()) {
                *x = *x + *c;
            }
        }
        Ok(Self {
            grid: self.grid.clone(),
            dim: self.dim,
            entries,
        })
    }

    pub fn scale(&self, s: T) -> Self {
        Self {
            grid: self.grid.clone(),
            dim: self.dim,
            entries: self.entries.iter().map(|x| *x * s).collect(),
        }
    }

    /// Smallest eigenvalue over all nodes.
    pub fn min_eigenvalue(&self) -> T {
        (0..self.grid.nodes())
            .map(|i| self.node(i).min_eigenvalue())
            .fold(T::infinity(), |a, b| if b < a { b } else { a })
    }

    pub fn max_abs(&self) -> T {
        self.entries
            .iter()
            .fold(T::zero(), |a, b| fmax(a, b.norm()))
    }

    /// Constant when every node carries the same form.
    pub fn as_constant(&self) -> Option<HermitianForm<T>> {
        let nn = self.dim * self.dim;
        let first = &self.entries[..nn];
        if self.entries.chunks(nn).all(|c| c == first) {
            Some(self.node(0))
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sup_zero_normalization() {
        let g = TorusGrid::<f64>::new(1, 8).unwrap();
        let u = PotentialField::from_fn(g, |c| (2.0 * std::f64::consts::PI * c[0]).sin() + 4.0);
        let s = u.with_sup_zero();
        assert_eq!(s.normalization(), Normalization::SupZero);
        assert!(s.max().abs() <= 1e-12);
        let m = u.with_mean_zero();
        assert!(m.mean().abs() < 1e-14);
    }

    #[test]
    fn constant_field_roundtrip() {
        let g = TorusGrid::<f64>::new(1, 8).unwrap();
        let f = FormField::constant(g.clone(), &HermitianForm::diag(&[2.0])).unwrap();
        assert_eq!(f.as_constant().unwrap(), HermitianForm::diag(&[2.0]));
        assert!(FormField::constant(g, &HermitianForm::<f64>::identity(2)).is_err());
    }
}
