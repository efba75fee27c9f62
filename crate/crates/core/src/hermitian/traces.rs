use serde::{Deserialize, Serialize};

use super::{dense, EigenvalueList, HermitianForm};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tolerances::inequality_slack;

fn factor_base<T: Real>(
    base: &HermitianForm<T>,
    arg: &HermitianForm<T>,
) -> Result<Vec<num_complex::Complex<T>>> {
    base.require_same_dim(arg)?;
    base.require_positive_definite("base form")?;
    dense::cholesky(base.entries(), base.dim())
        .ok_or_else(|| Error::Domain("base form failed Cholesky factorization".to_string()))
}

/// `Λ_base(arg) = tr(base^{-1} arg)`.
pub fn relative_trace<T: Real>(base: &HermitianForm<T>, arg: &HermitianForm<T>) -> Result<T> {
    let n = base.dim();
    let l = factor_base(base, arg)?;
    let inv = dense::inverse_from_cholesky(&l, n);
    let mut tr = T::zero();
    for j in 0..n {
        for k in 0..n {
            tr = tr + (inv[j * n + k] * arg.get(k, j)).re;
        }
    }
    Ok(tr)
}

/// Generalized eigenvalues of the pencil `(arg, base)`, ascending.
pub fn relative_eigenvalues<T: Real>(
    base: &HermitianForm<T>,
    arg: &HermitianForm<T>,
) -> Result<EigenvalueList<T>> {
    let n = base.dim();
    let l = factor_base(base, arg)?;
    let m = dense::congruence_by_inverse_cholesky(&l, n, arg.entries());
    Ok(EigenvalueList::from_sorted(dense::hermitian_eigen(&m, n).0))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct TraceProductWitness<T> {
    /// `Λ_a(b) · Λ_b(c)`
    pub lhs: T,
    /// `Λ_a(c)`
    pub rhs: T,
    pub holds: bool,
}

/// Evaluates `(Λ_a b)(Λ_b c) ≥ Λ_a c` for three metrics.
pub fn check_trace_product_inequality<T: Real>(
    a: &HermitianForm<T>,
    b: &HermitianForm<T>,
    c: &HermitianForm<T>,
) -> Result<TraceProductWitness<T>> {
    a.require_same_dim(b)?;
    a.require_same_dim(c)?;
    c.require_positive_definite("third metric")?;
    let lhs = relative_trace(a, b)? * relative_trace(b, c)?;
    let rhs = relative_trace(a, c)?;
    let holds = lhs >= rhs - inequality_slack(lhs, rhs);
    Ok(TraceProductWitness { lhs, rhs, holds })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn relative_trace_examples() {
        let i2 = HermitianForm::<f64>::identity(2);
        assert!(
            (relative_trace(&i2, &HermitianForm::<f64>::diag(&[3.0, 5.0])).unwrap() - 8.0).abs()
                < 1e-15
        );
        let a = HermitianForm::<f64>::diag(&[2.0, 4.0]);
        assert!((relative_trace(&a, &a).unwrap() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn relative_trace_matches_adjugate_oracle() {
        // inverse of [[a, b],[b, d]] is adj/det = [[d, -b],[-b, a]]/(ad - b^2)
        let (a, b, d) = (2.0, 1.0, 1.0);
        let det: f64 = a * d - b * b;
        let oracle = (d + a) / det;
        let base = HermitianForm::<f64>::from_real_rows(&[vec![a, b], vec![b, d]]).unwrap();
        let got = relative_trace(&base, &HermitianForm::identity(2)).unwrap();
        assert!((got - oracle).abs() < 1e-14);
        assert!((got - 3.0).abs() < 1e-14);
    }

    #[test]
    fn relative_eigenvalue_examples() {
        let g = HermitianForm::<f64>::from_real_rows(&[vec![3.0, 1.0], vec![1.0, 2.0]]).unwrap();
        let ev = relative_eigenvalues(&g, &g).unwrap();
        assert!(ev.values().iter().all(|x| (x - 1.0).abs() < 1e-14));

        // base^{-1} arg = diag(2, 1), eigenvalues of a 2x2 diagonal by inspection
        let ev = relative_eigenvalues(
            &HermitianForm::<f64>::diag(&[1.0, 4.0]),
            &HermitianForm::<f64>::diag(&[2.0, 4.0]),
        )
        .unwrap();
        assert!((ev.values()[0] - 1.0).abs() < 1e-14 && (ev.values()[1] - 2.0).abs() < 1e-14);

        let ev = relative_eigenvalues(
            &HermitianForm::identity(3),
            &HermitianForm::<f64>::diag(&[3.0, 1.0, 2.0]),
        )
        .unwrap();
        for (x, e) in ev.values().iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - e).abs() < 1e-14);
        }
    }

    #[test]
    fn errors() {
        let bad = HermitianForm::<f64>::diag(&[1.0, -1.0]);
        let ok = HermitianForm::<f64>::identity(2);
        assert!(matches!(relative_trace(&bad, &ok), Err(Error::Domain(_))));
        assert!(matches!(
            relative_eigenvalues(&bad, &ok),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            relative_trace(&ok, &HermitianForm::identity(3)),
            Err(Error::Usage(_))
        ));
        assert!(matches!(
            check_trace_product_inequality(&ok, &ok, &bad),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn trace_product_examples() {
        let i2 = HermitianForm::<f64>::identity(2);
        let w = check_trace_product_inequality(&i2, &i2, &i2).unwrap();
        assert_eq!((w.lhs, w.rhs, w.holds), (4.0, 2.0, true));
        let (a, b, c) = (
            HermitianForm::<f64>::diag(&[0.7]),
            HermitianForm::<f64>::diag(&[2.5]),
            HermitianForm::<f64>::diag(&[1.3]),
        );
        let w = check_trace_product_inequality(&a, &b, &c).unwrap();
        assert!((w.lhs - w.rhs).abs() <= 1e-12 * w.rhs);
    }
}
