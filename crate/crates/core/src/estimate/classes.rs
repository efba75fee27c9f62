use serde::{Deserialize, Serialize};

use crate::error::{usage, Result};
use crate::hermitian::{intersection_number, HermitianForm};
use crate::scalar::Real;

/// Constant nef classes `{α}`, `{β}` with reference metric `ω` and
/// regularization parameter `ε`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct ClassPair<T: Real> {
    pub alpha: HermitianForm<T>,
    pub beta: HermitianForm<T>,
    pub omega: HermitianForm<T>,
    pub epsilon: T,
}

impl<T: Real> ClassPair<T> {
    /// `omega` defaults to the identity.
    pub fn new(
        alpha: HermitianForm<T>,
        beta: HermitianForm<T>,
        omega: Option<HermitianForm<T>>,
        epsilon: T,
    ) -> Result<Self> {
        let omega = omega.unwrap_or_else(|| HermitianForm::identity(alpha.dim()));
        let pair = Self {
            alpha,
            beta,
            omega,
            epsilon,
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn with_epsilon(&self, epsilon: T) -> Result<Self> {
        let pair = Self {
            epsilon,
            ..self.clone()
        };
        pair.validate()?;
        Ok(pair)
    }

    pub fn dim(&self) -> usize {
        self.alpha.dim()
    }

    pub fn validate(&self) -> Result<()> {
        self.alpha.require_same_dim(&self.beta)?;
        self.alpha.require_same_dim(&self.omega)?;
        self.alpha
            .require_positive_semidefinite("alpha (nef class)")?;
        self.beta
            .require_positive_semidefinite("beta (nef class)")?;
        self.omega
            .require_positive_definite("omega (reference metric)")?;
        if !(self.epsilon >= T::zero()) {
            return usage(format!("epsilon must be positive, got {}", self.epsilon));
        }
        if self.epsilon == T::zero()
            && !(self.alpha.is_positive_definite() && self.beta.is_positive_definite())
        {
            return usage(
                "epsilon = 0 is only allowed when alpha and beta are already positive definite",
            );
        }
        Ok(())
    }

    /// `c_ε = ∫(α + εω)ⁿ` from the class data alone.
    pub fn c_eps_exact(&self) -> Result<T> {
        let (a, _) = regularize(self)?;
        let factors: Vec<_> = (0..self.dim()).map(|_| &a).collect();
        intersection_number(&factors)
    }

    /// `M_ε = ∫(α + εω)ⁿ⁻¹ ∧ (β + εω)` from the class data alone.
    pub fn m_eps_exact(&self) -> Result<T> {
        let (a, b) = regularize(self)?;
        let mut factors: Vec<_> = (1..self.dim()).map(|_| &a).collect();
        factors.push(&b);
        intersection_number(&factors)
    }
}

/// `(α_ε, β_ε) = (α + εω, β + εω)`; the regularizing potentials vanish for
/// constant representatives.
pub fn regularize<T: Real>(pair: &ClassPair<T>) -> Result<(HermitianForm<T>, HermitianForm<T>)> {
    pair.validate()?;
    let shift = pair.omega.scale(pair.epsilon);
    let a = &pair.alpha + &shift;
    let b = &pair.beta + &shift;
    a.require_positive_definite("alpha_eps")?;
    b.require_positive_definite("beta_eps")?;
    Ok((a, b))
}

/// Rescales a constant metric so that `∫ β_ε ∧ γⁿ⁻¹ = 1`; returns the
/// normalized metric and the factor applied.
pub fn normalize_gauduchon<T: Real>(
    gamma: &HermitianForm<T>,
    beta_eps: &HermitianForm<T>,
) -> Result<(HermitianForm<T>, T)> {
    gamma.require_same_dim(beta_eps)?;
    gamma.require_positive_definite("gamma")?;
    let n = gamma.dim();
    if n < 2 {
        return usage("normalization needs complex dimension >= 2 (γⁿ⁻¹ is trivial for n = 1)");
    }
    beta_eps.require_positive_semidefinite("beta_eps")?;
    if beta_eps.is_zero() {
        return crate::error::domain("beta_eps vanishes; the normalization is impossible");
    }
    let mut factors: Vec<&HermitianForm<T>> = vec![beta_eps];
    factors.extend((1..n).map(|_| gamma));
    let pairing = intersection_number(&factors)?;
    if !(pairing > T::zero()) {
        return crate::error::domain("∫ beta_eps ∧ gamma^(n-1) is not positive");
    }
    let s = pairing.powf(-T::one() / T::from_usize_lossy(n - 1));
    Ok((gamma.scale(s), s))
}

#[cfg(test)]
mod tests {
    use super::*;

    type H = HermitianForm<f64>;

    #[test]
    fn regularize_examples() {
        let pair = ClassPair::new(H::diag(&[1.0, 0.0]), H::zero(2), None, 0.1).unwrap();
        let (a, b) = regularize(&pair).unwrap();
        assert!((a.get(0, 0).re - 1.1).abs() < 1e-15 && (a.get(1, 1).re - 0.1).abs() < 1e-15);
        assert!((a.min_eigenvalue() - 0.1).abs() < 1e-15);
        assert!((b.min_eigenvalue() - 0.1).abs() < 1e-15);
    }

    #[test]
    fn c_eps_closed_form_and_monotone() {
        let base = ClassPair::new(H::diag(&[2.0, 1.0]), H::identity(2), None, 0.5).unwrap();
        let mut prev = f64::INFINITY;
        for eps in [0.5, 0.25, 0.125] {
            let c = base.with_epsilon(eps).unwrap().c_eps_exact().unwrap();
            assert!((c - 2.0 * (2.0 + eps) * (1.0 + eps)).abs() < 1e-13);
            assert!(c < prev && c > 4.0);
            prev = c;
        }
    }

    #[test]
    fn epsilon_rules() {
        assert!(ClassPair::new(H::diag(&[1.0, 0.0]), H::zero(2), None, 0.0).is_err());
        assert!(ClassPair::new(H::identity(2), H::identity(2), None, -0.1).is_err());
        assert!(ClassPair::new(H::identity(2), H::identity(2), None, 0.0).is_ok());
        assert!(ClassPair::new(H::diag(&[1.0, -1.0]), H::identity(2), None, 0.1).is_err());
    }

    #[test]
    fn normalization_examples() {
        let eps = 0.3;
        let beta = H::identity(2).scale(1.0 + eps);
        let (_, s) = normalize_gauduchon(&H::identity(2), &beta).unwrap();
        assert!((s - 1.0 / (2.0 * (1.0 + eps))).abs() < 1e-15);

        let gamma = H::from_real_rows(&[vec![2.0, 0.5], vec![0.5, 1.0]]).unwrap();
        let beta = H::diag(&[1.0, 3.0]);
        let (g1, _) = normalize_gauduchon(&gamma, &beta).unwrap();
        let (g2, s2) = normalize_gauduchon(&g1, &beta).unwrap();
        assert!((s2 - 1.0).abs() < 1e-14);
        let (g3, _) = normalize_gauduchon(&gamma.scale(7.5), &beta).unwrap();
        for (x, y) in g2.entries().iter().zip(g3.entries()) {
            assert!((x - y).norm() < 1e-14);
        }
        assert!(normalize_gauduchon(&gamma, &H::zero(2)).is_err());
    }
}
