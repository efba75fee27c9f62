use std::collections::BTreeMap;
use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;

use super::grid::pairwise_sum;
use super::{FormField, PotentialField, TorusGrid};
use crate::error::{usage, Result};
use crate::hermitian::{intersection_number, HermitianForm};
use crate::scalar::{factorial, fmax, Real};

/// Complex Hessian `(∂²u/∂z_j∂z̄_k)` of a periodic potential, computed spectrally.
///
/// Coefficients below `16 ε · max|û|` are treated as transform roundoff and
/// dropped before differentiation; otherwise the second-derivative symbol
/// amplifies that noise by up to `(πN)²`.
pub fn i_ddbar<T: Real>(u: &PotentialField<T>) -> FormField<T> {
    let grid = u.grid();
    let spec = grid.fft_real(u.values());
    hessian_from_spectrum(grid, &spec)
}

pub(crate) fn hessian_from_spectrum<T: Real>(
    grid: &Arc<TorusGrid<T>>,
    spec: &[Complex<T>],
) -> FormField<T> {
    let n = grid.complex_dim();
    let nn = n * n;
    let peak = spec.iter().fold(T::zero(), |m, s| fmax(m, s.norm()));
    let floor = T::lit(16.0) * T::epsilon() * peak;
    let mut entries = vec![Complex::zero(); grid.nodes() * nn];
    let mut buf = vec![Complex::zero(); grid.nodes()];
    for j in 0..n {
        for k in j..n {
            for (idx, (b, s)) in buf.iter_mut().zip(spec).enumerate() {
                *b = if s.norm() <= floor {
                    Complex::zero()
                } else {
                    *s * grid.ddbar_symbol(j, k, idx)
                };
            }
            grid.ifft(&mut buf);
            for (node, b) in buf.iter().enumerate() {
                if j == k {
                    entries[node * nn + j * n + j] = Complex::new(b.re, T::zero());
                } else {
                    entries[node * nn + j * n + k] = *b;
                    entries[node * nn + k * n + j] = b.conj();
                }
            }
        }
    }
    FormField::from_parts(grid.clone(), entries)
}

/// One factor of a top-degree wedge product.
#[derive(Clone, Copy, Debug)]
pub enum Factor<'a, T: Real> {
    Constant(&'a HermitianForm<T>),
    Field(&'a FormField<T>),
}

impl<'a, T: Real> From<&'a HermitianForm<T>> for Factor<'a, T> {
    fn from(h: &'a HermitianForm<T>) -> Self {
        Factor::Constant(h)
    }
}

impl<'a, T: Real> From<&'a FormField<T>> for Factor<'a, T> {
    fn from(f: &'a FormField<T>) -> Self {
        Factor::Field(f)
    }
}

impl<T: Real> Factor<'_, T> {
    fn dim(&self) -> usize {
        match self {
            Factor::Constant(h) => h.dim(),
            Factor::Field(f) => f.dim(),
        }
    }

    fn at(&self, node: usize) -> &[Complex<T>] {
        match self {
            Factor::Constant(h) => h.entries(),
            Factor::Field(f) => f.node_entries(node),
        }
    }
}

/// Per-node values of `A_1 ^ ... ^ A_n` as multiples of the unit volume form,
/// i.e. `n! D(A_1(x), ..., A_n(x))`.
pub fn top_density<T: Real>(factors: &[Factor<'_, T>]) -> Result<Vec<T>> {
    let grid = check_factors(factors)?
        .ok_or_else(|| crate::Error::Usage("top_density needs at least one field factor".into()))?;
    let n = factors.len();
    let fact = factorial::<T>(n);
    let mut mats: Vec<&[Complex<T>]> = Vec::with_capacity(n);
    Ok((0..grid.nodes())
        .map(|node| {
            mats.clear();
            mats.extend(factors.iter().map(|f| f.at(node)));
            fact * crate::hermitian::mixed_polarize(&mats, n)
        })
        .collect())
}

/// `∫_X A_1 ^ ... ^ A_n` by grid quadrature. All-constant input is delegated
/// to [`intersection_number`].
pub fn integrate_top<T: Real>(factors: &[Factor<'_, T>]) -> Result<T> {
    match check_factors(factors)? {
        None => {
            let forms: Vec<&HermitianForm<T>> = factors
                .iter()
                .map(|f| match f {
                    Factor::Constant(h) => *h,
                    Factor::Field(_) => unreachable!(),
                })
                .collect();
            intersection_number(&forms)
        }
        Some(grid) => {
            let dens = top_density(factors)?;
            Ok(grid.mean(&dens))
        }
    }
}

/// `∫ f dV` on the unit-volume torus.
pub fn integrate<T: Real>(u: &PotentialField<T>) -> T {
    pairwise_sum(u.values()) * u.grid().weight()
}

fn check_factors<T: Real>(factors: &[Factor<'_, T>]) -> Result<Option<Arc<TorusGrid<T>>>> {
    let n = factors.len();
    if n == 0 {
        return usage("wedge product needs at least one factor");
    }
    if let Some(f) = factors.iter().find(|f| f.dim() != n) {
        return usage(format!(
            "top-degree product of {n} factors needs dimension {n}, got {}",
            f.dim()
        ));
    }
    let mut grid: Option<Arc<TorusGrid<T>>> = None;
    for f in factors {
        if let Factor::Field(field) = f {
            match &grid {
                None => grid = Some(field.grid().clone()),
                Some(g) if **g != **field.grid() => {
                    return usage("factors live on different grids")
                }
                Some(_) => {}
            }
        }
    }
    Ok(grid)
}

type Multi = (u32, u32);

fn count_bits_above(set: u32, a: usize) -> u32 {
    (set >> (a + 1)).count_ones()
}

fn count_bits_below(set: u32, a: usize) -> u32 {
    (set & ((1u32 << a) - 1)).count_ones()
}

fn signed<T: Real>(x: Complex<T>, odd: bool) -> Complex<T> {
    if odd {
        -x
    } else {
        x
    }
}

/// Max-norm over nodes and components of `∂∂̄(g^k)`, with `g^k` the k-th
/// wedge power of a (1,1)-form field. Constant powers of `i` are dropped.
pub fn ddbar_closedness_defect<T: Real>(g: &FormField<T>, k: usize) -> Result<T> {
    let n = g.dim();
    if k < 1 || k + 1 > n {
        return usage(format!(
            "closedness degree k must satisfy 1 <= k <= n-1 = {}, got {k}",
            n.saturating_sub(1)
        ));
    }
    let grid = g.grid().clone();
    let nodes = grid.nodes();

    // g^k as coefficients of dz_I ^ dz̄_J, |I| = |J| = k.
    let mut power: BTreeMap<Multi, Vec<Complex<T>>> = BTreeMap::new();
    power.insert((0, 0), vec![Complex::new(T::one(), T::zero()); nodes]);
    for _ in 0..k {
        let mut next: BTreeMap<Multi, Vec<Complex<T>>> = BTreeMap::new();
        for (&(i_set, j_set), coeff) in &power {
            for a in (0..n).filter(|a| i_set & (1 << a) == 0) {
                for b in (0..n).filter(|b| j_set & (1 << b) == 0) {
                    // dz_I dz̄_J dz_a dz̄_b = (-1)^{|J|} dz_I dz_a dz̄_J dz̄_b
                    let odd = (j_set.count_ones()
                        + count_bits_above(i_set, a)
                        + count_bits_above(j_set, b))
                        % 2
                        == 1;
                    let gab = g.component(a, b);
                    let slot = next
                        .entry((i_set | 1 << a, j_set | 1 << b))
                        .or_insert_with(|| vec![Complex::zero(); nodes]);
                    for ((s, c), x) in slot.iter_mut().zip(coeff).zip(&gab) {
                        *s = *s + signed(*c * *x, odd);
                    }
                }
            }
        }
        power = next;
    }

    // ∂∂̄(f dz_I dz̄_J) = Σ ∂_a∂̄_b f dz_a dz̄_b dz_I dz̄_J, accumulated spectrally.
    let mut out: BTreeMap<Multi, Vec<Complex<T>>> = BTreeMap::new();
    for (&(i_set, j_set), coeff) in &power {
        let mut spec = coeff.clone();
        grid.fft(&mut spec);
        for a in (0..n).filter(|a| i_set & (1 << a) == 0) {
            for b in (0..n).filter(|b| j_set & (1 << b) == 0) {
                let odd =
                    (i_set.count_ones() + count_bits_below(i_set, a) + count_bits_below(j_set, b))
                        % 2
                        == 1;
                let slot = out
                    .entry((i_set | 1 << a, j_set | 1 << b))
                    .or_insert_with(|| vec![Complex::zero(); nodes]);
                for (idx, (s, f)) in slot.iter_mut().zip(&spec).enumerate() {
                    *s = *s + signed(*f * grid.ddbar_symbol(a, b, idx), odd);
                }
            }
        }
    }

    let mut defect = T::zero();
    for (_, mut spec) in out {
        grid.ifft(&mut spec);
        defect = spec.iter().fold(defect, |m, z| fmax(m, z.norm()));
    }
    Ok(defect)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn constant_potential_has_zero_hessian() {
        let g = TorusGrid::<f64>::new(2, 8).unwrap();
        let u = PotentialField::from_fn(g, |_| 3.5);
        assert!(i_ddbar(&u).max_abs() < 1e-13);
    }

    #[test]
    fn one_dimensional_cosine() {
        let g = TorusGrid::<f64>::new(1, 64).unwrap();
        let u = PotentialField::from_fn(g.clone(), |c| (2.0 * PI * c[0]).cos());
        let h = i_ddbar(&u);
        for node in 0..g.nodes() {
            let expect = -PI * PI * (2.0 * PI * g.coords(node)[0]).cos();
            let got = h.node_entries(node)[0].re;
            assert!(
                (got - expect).abs() < 1e-12,
                "node {node}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn entry_means_vanish() {
        let g = TorusGrid::<f64>::new(2, 8).unwrap();
        let u = PotentialField::from_fn(g.clone(), |c| {
            (2.0 * PI * (c[0] + 2.0 * c[3])).sin() * (2.0 * PI * c[1]).cos()
        });
        let h = i_ddbar(&u);
        for j in 0..2 {
            for k in 0..2 {
                let comp = h.component(j, k);
                let mean: Complex<f64> = comp.iter().sum::<Complex<f64>>() / g.nodes() as f64;
                assert!(mean.norm() < 1e-12);
            }
        }
    }

    #[test]
    fn integrate_top_examples() {
        let g = TorusGrid::<f64>::new(2, 8).unwrap();
        let a = HermitianForm::<f64>::diag(&[2.0, 1.0]);
        assert!((integrate_top(&[(&a).into(), (&a).into()]).unwrap() - 4.0).abs() < 1e-14);
        let af = FormField::constant(g.clone(), &a).unwrap();
        assert!((integrate_top(&[(&af).into(), (&af).into()]).unwrap() - 4.0).abs() < 1e-13);
        let z = HermitianForm::zero(2);
        assert_eq!(integrate_top(&[(&af).into(), (&z).into()]).unwrap(), 0.0);
        let other = TorusGrid::<f64>::new(2, 10).unwrap();
        let bf = FormField::constant(other, &a).unwrap();
        assert!(integrate_top(&[(&af).into(), (&bf).into()]).is_err());
        assert!(integrate_top(&[(&a).into()]).is_err());
    }

    #[test]
    fn closedness_defect_range_checks() {
        let g = TorusGrid::<f64>::new(2, 8).unwrap();
        let f = FormField::constant(g, &HermitianForm::identity(2)).unwrap();
        assert!(ddbar_closedness_defect(&f, 0).is_err());
        assert!(ddbar_closedness_defect(&f, 2).is_err());
        assert!(ddbar_closedness_defect(&f, 1).unwrap() <= 1e-12);
    }
}
