//! Restarted GMRES with right preconditioning.

use crate::scalar::{fabs, Real};

pub(crate) struct KrylovOutcome<T> {
    pub x: Vec<T>,
    pub iterations: usize,
    pub relative_residual: T,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).fold(T::zero(), |acc, (x, y)| acc + *x * *y)
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

/// Solves `A x = b` from `x = 0`, with `A` and the preconditioner `M ≈ A⁻¹`
/// given as closures writing into their second argument.
pub(crate) fn gmres<T: Real>(
    mut apply: impl FnMut(&[T], &mut [T]),
    mut precondition: impl FnMut(&[T], &mut [T]),
    b: &[T],
    rel_tol: T,
    restart: usize,
    max_iters: usize,
) -> KrylovOutcome<T> {
    let len = b.len();
    let mut x = vec![T::zero(); len];
    let b_norm = norm(b);
    if b_norm == T::zero() {
        return KrylovOutcome {
            x,
            iterations: 0,
            relative_residual: T::zero(),
        };
    }
    let restart = restart.max(1);
    let mut total = 0;
    let mut r = b.to_vec();
    let mut work = vec![T::zero(); len];
    let mut z = vec![T::zero(); len];
    let mut rel = T::one();

    while total < max_iters {
        let beta = norm(&r);
        rel = beta / b_norm;
        if rel <= rel_tol {
            break;
        }
        let mut basis: Vec<Vec<T>> = vec![r.iter().map(|v| *v / beta).collect()];
        let mut precond_basis: Vec<Vec<T>> = Vec::with_capacity(restart);
        let mut h = vec![vec![T::zero(); restart]; restart + 1];
        let mut cs = vec![T::zero(); restart];
        let mut sn = vec![T::zero(); restart];
        let mut g = vec![T::zero(); restart + 1];
        g[0] = beta;
        let mut steps = 0;

        for j in 0..restart {
            if total >= max_iters {
                break;
            }
            precondition(&basis[j], &mut z);
            apply(&z, &mut work);
            precond_basis.push(z.clone());
            total += 1;

            let mut w = work.clone();
            for (i, v) in basis.iter().enumerate() {
                let hij = dot(&w, v);
                h[i][j] = hij;
                w.iter_mut()
                    .zip(v)
                    .for_each(|(wi, vi)| *wi = *wi - hij * *vi);
            }
            let wn = norm(&w);
            h[j + 1][j] = wn;

            for i in 0..j {
                let t = cs[i] * h[i][j] + sn[i] * h[i + 1][j];
                h[i + 1][j] = -sn[i] * h[i][j] + cs[i] * h[i + 1][j];
                h[i][j] = t;
            }
            let denom = h[j][j].hypot(h[j + 1][j]);
            if denom == T::zero() {
                cs[j] = T::one();
                sn[j] = T::zero();
            } else {
                cs[j] = h[j][j] / denom;
                sn[j] = h[j + 1][j] / denom;
            }
            h[j][j] = cs[j] * h[j][j] + sn[j] * h[j + 1][j];
            h[j + 1][j] = T::zero();
            g[j + 1] = -sn[j] * g[j];
            g[j] = cs[j] * g[j];
            steps = j + 1;
            rel = fabs(g[j + 1]) / b_norm;

            if rel <= rel_tol || wn <= T::epsilon() * b_norm {
                break;
            }
            basis.push(w.iter().map(|v| *v / wn).collect());
        }

        // Back substitution for the least-squares coefficients.
        let mut y = vec![T::zero(); steps];
        for i in (0..steps).rev() {
            let mut s = g[i];
            for k in (i + 1)..steps {
                s = s - h[i][k] * y[k];
            }
            y[i] = s / h[i][i];
        }
        for (k, yk) in y.iter().enumerate() {
            x.iter_mut()
                .zip(&precond_basis[k])
                .for_each(|(xi, zi)| *xi = *xi + *yk * *zi);
        }

        apply(&x, &mut work);
        r.iter_mut()
            .zip(b)
            .zip(&work)
            .for_each(|((ri, bi), ai)| *ri = *bi - *ai);
        rel = norm(&r) / b_norm;
        if rel <= rel_tol || steps == 0 {
            break;
        }
    }
    KrylovOutcome {
        x,
        iterations: total,
        relative_residual: rel,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_small_nonsymmetric_system() {
        let a = [[4.0, 1.0, 0.0], [2.0, 5.0, 1.0], [0.0, -1.0, 3.0]];
        let b = [1.0, 2.0, 3.0];
        let out = gmres(
            |v: &[f64], o: &mut [f64]| {
                for i in 0..3 {
                    o[i] = (0..3).map(|k| a[i][k] * v[k]).sum();
                }
            },
            |v: &[f64], o: &mut [f64]| o.copy_from_slice(v),
            &b,
            1e-14,
            2,
            100,
        );
        for i in 0..3 {
            let ax: f64 = (0..3).map(|k| a[i][k] * out.x[k]).sum();
            assert!((ax - b[i]).abs() < 1e-12);
        }
    }
}
