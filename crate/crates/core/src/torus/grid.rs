use std::fmt;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use rustfft::{Fft, FftPlanner};

use crate::error::{usage, Result};
use crate::scalar::Real;

/// Uniform periodic grid on the unit-volume torus `Cⁿ / (Z + iZ)ⁿ`.
///
/// Real axes are ordered `(x_1, y_1, ..., x_n, y_n)` with `z_j = x_j + i y_j`;
/// node data is row-major over those axes, so the last axis varies fastest.
pub struct TorusGrid<T: Real> {
    complex_dim: usize,
    resolution: usize,
    nodes: usize,
    forward: Arc<dyn Fft<T>>,
    inverse: Arc<dyn Fft<T>>,
    /// `kappa[j][idx] = k_{x_j} + i k_{y_j}` with Nyquist frequencies zeroed.
    kappa: Vec<Vec<Complex<T>>>,
    nyquist: Vec<bool>,
}

impl<T: Real> fmt::Debug for TorusGrid<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TorusGrid")
            .field("complex_dim", &self.complex_dim)
            .field("resolution", &self.resolution)
            .finish()
    }
}

impl<T: Real> PartialEq for TorusGrid<T> {
    fn eq(&self, other: &Self) -> bool {
        self.complex_dim == other.complex_dim && self.resolution == other.resolution
    }
}

impl<T: Real> TorusGrid<T> {
    /// `resolution` points per real axis; must be even and at least 8.
    pub fn new(complex_dim: usize, resolution: usize) -> Result<Arc<Self>> {
        if complex_dim == 0 {
            return usage("torus complex dimension must be positive");
        }
        if resolution < 8 || !resolution.is_multiple_of(2) {
            return usage(format!(
                "grid resolution must be even and >= 8, got {resolution}"
            ));
        }
        let axes = 2 * complex_dim;
        let nodes = resolution
            .checked_pow(axes as u32)
            .filter(|&m| m <= 1 << 26)
            .ok_or_else(|| crate::Error::Usage(format!("grid {resolution}^{axes} is too large")))?;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(resolution);
        let inverse = planner.plan_fft_inverse(resolution);

        let half = resolution as i64 / 2;
        let mut kappa = vec![Vec::with_capacity(nodes); complex_dim];
        let mut nyquist = Vec::with_capacity(nodes);
        let mut digits = vec![0usize; axes];
        for idx in 0..nodes {
            let mut rem = idx;
            for a in (0..axes).rev() {
                digits[a] = rem % resolution;
                rem /= resolution;
            }
            let freq = |d: usize| -> i64 {
                let k = d as i64;
                if k < half {
                    k
                } else {
                    k - resolution as i64
                }
            };
            let mut has_nyq = false;
            for j in 0..complex_dim {
                let mut kx = freq(digits[2 * j]);
                let mut ky = freq(digits[2 * j + 1]);
                if kx == -half {
                    kx = 0;
                    has_nyq = true;
                }
                if ky == -half {
                    ky = 0;
                    has_nyq = true;
                }
                kappa[j].push(Complex::new(T::lit(kx as f64), T::lit(ky as f64)));
            }
            nyquist.push(has_nyq);
        }

        Ok(Arc::new(Self {
            complex_dim,
            resolution,
            nodes,
            forward,
            inverse,
            kappa,
            nyquist,
        }))
    }

    pub fn complex_dim(&self) -> usize {
        self.complex_dim
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn real_axes(&self) -> usize {
        2 * self.complex_dim
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    /// Quadrature weight of each node; the weights sum to one.
    pub fn weight(&self) -> T {
        T::one() / T::from_usize_lossy(self.nodes)
    }

    /// Real coordinates in `[0, 1)` of a node, ordered `(x_1, y_1, ...)`.
    pub fn coords(&self, node: usize) -> Vec<T> {
        let axes = self.real_axes();
        let mut out = vec![T::zero(); axes];
        let mut rem = node;
        let n = T::from_usize_lossy(self.resolution);
        for a in (0..axes).rev() {
            out[a] = T::from_usize_lossy(rem % self.resolution) / n;
            rem /= self.resolution;
        }
        out
    }

    /// Mean over nodes with pairwise summation.
    pub fn mean(&self, values: &[T]) -> T {
        pairwise_sum(values) * self.weight()
    }

    /// `∂_{z_j} ∂_{z̄_k}` multiplier at spectral index `idx`: `-π² conj(κ_j) κ_k`.
    #[inline]
    pub fn ddbar_symbol(&self, j: usize, k: usize, idx: usize) -> Complex<T> {
        let pi2 = T::PI() * T::PI();
        -(self.kappa[j][idx].conj() * self.kappa[k][idx]) * pi2
    }

    /// Spectral index carries a Nyquist frequency on some axis.
    #[inline]
    pub fn is_nyquist(&self, idx: usize) -> bool {
        self.nyquist[idx]
    }

    /// Unnormalized forward transform over all real axes.
    pub fn fft(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.forward);
    }

    /// Inverse transform including the `1/N^{2n}` factor.
    pub fn ifft(&self, data: &mut [Complex<T>]) {
        self.transform(data, &self.inverse);
        let s = self.weight();
        data.iter_mut().for_each(|x| *x = *x * s);
    }

    pub fn fft_real(&self, values: &[T]) -> Vec<Complex<T>> {
        let mut buf: Vec<Complex<T>> = values.iter().map(|&x| Complex::new(x, T::zero())).collect();
        self.fft(&mut buf);
        buf
    }

    /// Drops the mean and every mode with a Nyquist component.
    pub fn project_band(&self, values: &mut [T]) {
        let mut spec = self.fft_real(values);
        spec[0] = Complex::zero();
        for (idx, s) in spec.iter_mut().enumerate() {
            if self.nyquist[idx] {
                *s = Complex::zero();
            }
        }
        self.ifft(&mut spec);
        for (v, s) in values.iter_mut().zip(&spec) {
            *v = s.re;
        }
    }

    fn transform(&self, data: &mut [Complex<T>], plan: &Arc<dyn Fft<T>>) {
        assert_eq!(data.len(), self.nodes, "field length does not match grid");
        let n = self.resolution;
        let axes = self.real_axes();
        let mut scratch = vec![Complex::zero(); plan.get_inplace_scratch_len()];
        let mut lines = vec![Complex::zero(); self.nodes];
        for a in 0..axes {
            let stride = n.pow((axes - 1 - a) as u32);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let outer = self.nodes / (n * stride);
            let mut line = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    let dst = &mut lines[line * n..(line + 1) * n];
                    for (t, d) in dst.iter_mut().enumerate() {
                        *d = data[base + t * stride];
                    }
                    line += 1;
                }
            }
            plan.process_with_scratch(&mut lines, &mut scratch);
            let mut line = 0;
            for o in 0..outer {
                for i in 0..stride {
                    let base = o * n * stride + i;
                    let src = &lines[line * n..(line + 1) * n];
                    for (t, s) in src.iter().enumerate() {
                        data[base + t * stride] = *s;
                    }
                    line += 1;
                }
            }
        }
    }
}

pub(crate) fn pairwise_sum<T: Real>(values: &[T]) -> T {
    if values.len() <= 64 {
        return values.iter().fold(T::zero(), |a, b| a + *b);
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
