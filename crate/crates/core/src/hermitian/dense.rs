//! Small dense kernels on row-major complex `n x n` matrices.

use num_complex::Complex;
use num_traits::{Float, One, Zero};

use crate::scalar::{fabs, Real};

pub(crate) type C<T> = Complex<T>;

/// Eigen-decomposition of a Hermitian matrix by cyclic complex Jacobi rotations.
///
/// Returns eigenvalues in ascending order and the unitary matrix whose
/// columns are the matching eigenvectors (row-major).
pub fn hermitian_eigen<T: Real>(a: &[C<T>], n: usize) -> (Vec<T>, Vec<C<T>>) {
    debug_assert_eq!(a.len(), n * n);
    let mut m = a.to_vec();
    let mut v = identity::<T>(n);
    let eps = <T as Float>::epsilon();

    for _sweep in 0..64 {
        let mut off = T::zero();
        let mut total = T::zero();
        for i in 0..n {
            for j in 0..n {
                let x = m[i * n + j].norm_sqr();
                total = total + x;
                if i != j {
                    off = off + x;
                }
            }
        }
        if off <= eps * eps * total * T::lit(1e-4) || off == T::zero() {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[p * n + q];
                let r = apq.norm();
                if r == T::zero() {
                    continue;
                }
                let phase = apq / r;
                let app = m[p * n + p].re;
                let aqq = m[q * n + q].re;
                let theta = (aqq - app) / (r + r);
                let t = if theta == T::zero() {
                    T::one()
                } else {
                    let sign = if theta > T::zero() {
                        T::one()
                    } else {
                        -T::one()
                    };
                    sign / (fabs(theta) + (theta * theta + T::one()).sqrt())
                };
                let c = T::one() / (t * t + T::one()).sqrt();
                let s = t * c;
                let g_pp = C::new(c, T::zero());
                let g_pq = C::new(s, T::zero());
                let g_qp = phase.conj() * (-s);
                let g_qq = phase.conj() * c;

                for i in 0..n {
                    let aip = m[i * n + p];
                    let aiq = m[i * n + q];
                    m[i * n + p] = aip * g_pp + aiq * g_qp;
                    m[i * n + q] = aip * g_pq + aiq * g_qq;
                    let vip = v[i * n + p];
                    let viq = v[i * n + q];
                    v[i * n + p] = vip * g_pp + viq * g_qp;
                    v[i * n + q] = vip * g_pq + viq * g_qq;
                }
                for j in 0..n {
                    let apj = m[p * n + j];
                    let aqj = m[q * n + j];
                    m[p * n + j] = g_pp.conj() * apj + g_qp.conj() * aqj;
                    m[q * n + j] = g_pq.conj() * apj + g_qq.conj() * aqj;
                }
                m[p * n + q] = C::zero();
                m[q * n + p] = C::zero();
                m[p * n + p] = C::new(m[p * n + p].re, T::zero());
                m[q * n + q] = C::new(m[q * n + q].re, T::zero());
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[i * n + i]
            .re
            .partial_cmp(&m[j * n + j].re)
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let values = order.iter().map(|&i| m[i * n + i].re).collect();
    let mut vectors = vec![C::zero(); n * n];
    for (col, &src) in order.iter().enumerate() {
        for row in 0..n {
            vectors[row * n + col] = v[row * n + src];
        }
    }
    (values, vectors)
}

pub fn identity<T: Real>(n: usize) -> Vec<C<T>> {
    let mut m = vec![C::zero(); n * n];
    for i in 0..n {
        m[i * n + i] = C::one();
    }
    m
}

/// Determinant by LU with partial pivoting.
pub fn determinant<T: Real>(a: &[C<T>], n: usize) -> C<T> {
    match n {
        0 => return C::one(),
        1 => return a[0],
        2 => return a[0] * a[3] - a[1] * a[2],
        _ => {}
    }
    let mut m = a.to_vec();
    let mut det = C::<T>::one();
    for col in 0..n {
        let mut piv = col;
        let mut best = m[col * n + col].norm();
        for row in (col + 1)..n {
            let x = m[row * n + col].norm();
            if x > best {
                best = x;
                piv = row;
            }
        }
        if best == T::zero() {
            return C::zero();
        }
        if piv != col {
            for j in 0..n {
                m.swap(col * n + j, piv * n + j);
            }
            det = -det;
        }
        let d = m[col * n + col];
        det = det * d;
        for row in (col + 1)..n {
            let f = m[row * n + col] / d;
            if f == C::zero() {
                continue;
            }
            for j in (col + 1)..n {
                let x = m[col * n + j];
                m[row * n + j] = m[row * n + j] - f * x;
            }
        }
    }
    det
}

/// Lower Cholesky factor of a Hermitian positive definite matrix, `None` on a
/// non-positive pivot.
pub fn cholesky<T: Real>(a: &[C<T>], n: usize) -> Option<Vec<C<T>>> {
    let mut l = vec![C::<T>::zero(); n * n];
    for j in 0..n {
        let mut d = a[j * n + j].re;
        for k in 0..j {
            d = d - l[j * n + k].norm_sqr();
        }
        if !(d > T::zero()) {
            return None;
        }
        let djj = d.sqrt();
        l[j * n + j] = C::new(djj, T::zero());
        for i in (j + 1)..n {
            let mut s = a[i * n + j];
            for k in 0..j {
                s = s - l[i * n + k] * l[j * n + k].conj();
            }
            l[i * n + j] = s / djj;
        }
    }
    Some(l)
}

/// `log det` from a Cholesky factor.
pub fn cholesky_logdet<T: Real>(l: &[C<T>], n: usize) -> T {
    let half = (0..n).fold(T::zero(), |acc, i| acc + l[i * n + i].re.ln());
    half + half
}

/// Solves `L X = B` in place for lower-triangular `L`; `B` is `n x cols`.
pub fn forward_substitute<T: Real>(l: &[C<T>], n: usize, b: &mut [C<T>], cols: usize) {
    for c in 0..cols {
        for i in 0..n {
            let mut s = b[i * cols + c];
            for k in 0..i {
                s = s - l[i * n + k] * b[k * cols + c];
            }
            b[i * cols + c] = s / l[i * n + i];
        }
    }
}

/// Inverse of a Hermitian positive definite matrix via its Cholesky factor.
pub fn inverse_from_cholesky<T: Real>(l: &[C<T>], n: usize) -> Vec<C<T>> {
    // A^{-1} = L^{-*} L^{-1}; compute W = L^{-1} then W^* W.
    let mut w = identity::<T>(n);
    forward_substitute(l, n, &mut w, n);
    let mut inv = vec![C::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            let mut s = C::zero();
            for k in 0..n {
                s = s + w[k * n + i].conj() * w[k * n + j];
            }
            inv[i * n + j] = s;
        }
    }
    inv
}

/// `L^{-1} B L^{-*}` for Hermitian `B`, symmetrized.
pub fn congruence_by_inverse_cholesky<T: Real>(l: &[C<T>], n: usize, b: &[C<T>]) -> Vec<C<T>> {
    let mut x = b.to_vec();
    forward_substitute(l, n, &mut x, n);
    // x = L^{-1} B; now compute (L^{-1} (L^{-1} B)^*)^* = L^{-1} B L^{-*}.
    let mut y = vec![C::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            y[i * n + j] = x[j * n + i].conj();
        }
    }
    forward_substitute(l, n, &mut y, n);
    let half = T::lit(0.5);
    let mut out = vec![C::zero(); n * n];
    for i in 0..n {
        for j in 0..n {
            out[i * n + j] = (y[i * n + j] + y[j * n + i].conj()) * half;
        }
    }
    out
}
