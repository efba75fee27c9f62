use std::sync::Arc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{normalize_gauduchon, regularize, ClassPair};
use crate::error::{usage, Result};
use crate::hermitian::{intersection_number, relative_eigenvalues, relative_trace, HermitianForm};
use crate::monge_ampere::{solve_ma, SolveResult, SolveSummary, SolverConfig};
use crate::scalar::{fabs, factorial, fmax, Real};
use crate::tolerances::inequality_slack;
use crate::torus::{
    ddbar_closedness_defect, i_ddbar, integrate_top, top_density, Factor, FormField,
    PotentialField, TorusGrid,
};

/// Relative tolerance for identities that hold up to the solver residual.
pub const IDENTITY_REL: f64 = 1e-8;
/// Tolerance for the normalization integral.
pub const NORMALIZATION_ABS: f64 = 1e-10;

/// Metric playing the role of one `γ_{m,ε}`.
#[derive(Clone, Debug)]
pub enum Gamma<T: Real> {
    Constant(HermitianForm<T>),
    /// `γ(x) = exp(g(x) / (n−1)) · base`, so `β ∧ γⁿ⁻¹` picks up the factor `e^g`.
    Conformal {
        base: HermitianForm<T>,
        log_factor: PotentialField<T>,
    },
}

impl<T: Real> Gamma<T> {
    pub fn base(&self) -> &HermitianForm<T> {
        match self {
            Gamma::Constant(h) => h,
            Gamma::Conformal { base, .. } => base,
        }
    }

    pub fn is_perturbed(&self) -> bool {
        matches!(self, Gamma::Conformal { .. })
    }

    fn field(&self, grid: &Arc<TorusGrid<T>>) -> Result<FormField<T>> {
        match self {
            Gamma::Constant(h) => FormField::constant(grid.clone(), h),
            Gamma::Conformal { base, log_factor } => {
                if **log_factor.grid() != **grid {
                    return usage("gamma perturbation lives on a different grid");
                }
                let k = T::from_usize_lossy(base.dim().saturating_sub(1).max(1));
                let scale: Vec<T> = log_factor.values().iter().map(|g| (*g / k).exp()).collect();
                FormField::conformal(grid.clone(), base, &scale)
            }
        }
    }
}

/// Band-limited log-factor `g = a · Σ_j ∂_j∂̄_j φ / max|·|` for a random
/// trigonometric potential `φ` with frequencies `|k| ≤ 1` on every axis.
///
/// The density `e^g` is then resolved to roundoff once `N ≥ 16`.
pub fn random_log_factor<T: Real, R: Rng + ?Sized>(
    grid: &Arc<TorusGrid<T>>,
    amplitude: T,
    rng: &mut R,
) -> PotentialField<T> {
    let axes = grid.real_axes();
    let mut modes: Vec<(Vec<i32>, f64, f64)> = Vec::new();
    let total = 3usize.pow(axes as u32);
    for code in 1..total {
        let mut c = code;
        let k: Vec<i32> = (0..axes)
            .map(|_| {
                let d = (c % 3) as i32 - 1;
                c /= 3;
                d
            })
            .collect();
        let a: f64 = rng.sample(StandardNormal);
        let b: f64 = rng.sample(StandardNormal);
        let decay = 1.0 / (1.0 + k.iter().map(|x| (x * x) as f64).sum::<f64>());
        modes.push((k, a * decay, b * decay));
    }
    let two_pi = 2.0 * std::f64::consts::PI;
    let phi = PotentialField::from_fn(grid.clone(), |x| {
        let mut v = 0.0;
        for (k, a, b) in &modes {
            let phase: f64 = k
                .iter()
                .zip(x)
                .map(|(ki, xi)| *ki as f64 * xi.to_f64_lossy())
                .sum::<f64>()
                * two_pi;
            v += a * phase.cos() + b * phase.sin();
        }
        T::lit(v)
    });
    let h = i_ddbar(&phi);
    let n = grid.complex_dim();
    let trace: Vec<T> = (0..grid.nodes())
        .map(|i| (0..n).fold(T::zero(), |acc, j| acc + h.node_entries(i)[j * n + j].re))
        .collect();
    let peak = trace.iter().fold(T::zero(), |m, v| fmax(m, fabs(*v)));
    let scale = if peak > T::zero() {
        amplitude / peak
    } else {
        T::zero()
    };
    PotentialField::new(grid.clone(), trace.iter().map(|v| *v * scale).collect())
        .expect("grid-sized field")
}

/// Every scalar of one run of the estimate.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct EstimateReport<T: Real> {
    pub n: usize,
    pub grid: usize,
    pub epsilon: T,
    pub perturbed_gamma: bool,
    /// Factor applied to `γ` so that `∫β_ε∧γⁿ⁻¹ = 1`.
    pub gamma_scale: T,
    /// `max |∂∂̄ γⁿ⁻¹|`; zero for constant metrics (Gauduchon).
    pub gauduchon_defect: T,
    pub c_eps: T,
    /// `|∫α̃ⁿ − c_ε| / c_ε`.
    pub mass_defect: T,
    pub m_eps: T,
    /// `∫(α+εω)ⁿ⁻¹∧(β+εω)` from class data.
    pub m_eps_class: T,
    pub m_independence_defect: T,
    /// `∫α̃ ∧ γⁿ⁻¹`.
    pub lhs_factor1: T,
    pub lhs_product: T,
    /// `c_ε / n`.
    pub rhs: T,
    /// `lhs_product − rhs`.
    pub margin: T,
    pub chain_a: T,
    pub chain_b: T,
    pub chain_c: T,
    pub chain_d: T,
    pub chain_e: T,
    /// `max_x |λ₁⋯λ_n − c_ε(μ₁+⋯+μ_n)/n| / (c_ε(μ₁+⋯+μ_n)/n)`.
    pub pointwise_translation_defect: T,
    /// `∫ (μ₁+⋯+μ_n)/n γⁿ`.
    pub normalization_check: T,
    pub solve: SolveSummary<T>,
    pub flags: Vec<String>,
    pub pass: bool,
}

/// Regularizes, normalizes `γ`, solves `(α_ε + i∂∂̄u)ⁿ = c_ε β_ε ∧ γⁿ⁻¹` and
/// evaluates both sides of the estimate and every step of its proof chain.
pub fn run_estimate<T: Real>(
    pair: &ClassPair<T>,
    gamma: &Gamma<T>,
    grid: &Arc<TorusGrid<T>>,
    cfg: &SolverConfig<T>,
) -> Result<EstimateReport<T>> {
    run_estimate_with_solution(pair, gamma, grid, cfg).map(|(r, _)| r)
}

/// As [`run_estimate`], also returning the solver output.
pub fn run_estimate_with_solution<T: Real>(
    pair: &ClassPair<T>,
    gamma: &Gamma<T>,
    grid: &Arc<TorusGrid<T>>,
    cfg: &SolverConfig<T>,
) -> Result<(EstimateReport<T>, SolveResult<T>)> {
    let n = pair.dim();
    if n < 2 {
        return usage("the estimate pipeline needs complex dimension >= 2");
    }
    if grid.complex_dim() != n || gamma.base().dim() != n {
        return usage("grid, classes and gamma must share the complex dimension");
    }
    gamma.base().require_positive_definite("gamma")?;
    let (alpha_eps, beta_eps) = regularize(pair)?;
    let nf = T::from_usize_lossy(n);

    let raw_gamma = gamma.field(grid)?;
    let gauduchon_defect = ddbar_closedness_defect(&raw_gamma, n - 1)?;
    let gamma_scale = match gamma {
        Gamma::Constant(h) => normalize_gauduchon(h, &beta_eps)?.1,
        Gamma::Conformal { .. } => {
            let mut f: Vec<Factor<T>> = vec![(&beta_eps).into()];
            f.extend((1..n).map(|_| Factor::from(&raw_gamma)));
            let pairing = integrate_top(&f)?;
            pairing.powf(-T::one() / T::from_usize_lossy(n - 1))
        }
    };
    let gamma_field = raw_gamma.scale(gamma_scale);

    let mut dens_factors: Vec<Factor<T>> = vec![(&beta_eps).into()];
    dens_factors.extend((1..n).map(|_| Factor::from(&gamma_field)));
    let density = PotentialField::new(grid.clone(), top_density(&dens_factors)?)?;

    let background = FormField::constant(grid.clone(), &alpha_eps)?;
    let solved = solve_ma(&background, &density, cfg)?;
    let c_eps = solved.constant_c;
    let alpha_tilde = background.add(&i_ddbar(&solved.u))?;

    let top: Vec<Factor<T>> = (0..n).map(|_| Factor::from(&alpha_tilde)).collect();
    let mass = integrate_top(&top)?;
    let mass_defect = fabs(mass - c_eps) / c_eps;

    let mut m_factors: Vec<Factor<T>> = (1..n).map(|_| Factor::from(&alpha_tilde)).collect();
    m_factors.push((&beta_eps).into());
    let m_eps = integrate_top(&m_factors)?;
    let mut class_factors: Vec<&HermitianForm<T>> = (1..n).map(|_| &alpha_eps).collect();
    class_factors.push(&beta_eps);
    let m_eps_class = intersection_number(&class_factors)?;
    let m_independence_defect = fabs(m_eps - m_eps_class) / fabs(m_eps_class);

    let mut f1: Vec<Factor<T>> = vec![(&alpha_tilde).into()];
    f1.extend((1..n).map(|_| Factor::from(&gamma_field)));
    let lhs_factor1 = integrate_top(&f1)?;
    let lhs_product = lhs_factor1 * m_eps;
    let rhs = c_eps / nf;

    // Pointwise eigenvalue data against the measure γⁿ = n! det γ dV.
    let fact = factorial::<T>(n);
    let w = grid.weight();
    let (mut int_a, mut int_b, mut int_c, mut int_d, mut int_norm) =
        (T::zero(), T::zero(), T::zero(), T::zero(), T::zero());
    let mut translation = T::zero();
    let sqrt_ratio = (nf / c_eps).sqrt();
    for node in 0..grid.nodes() {
        let g = gamma_field.node(node);
        let at = alpha_tilde.node(node);
        let lambda = relative_eigenvalues(&g, &at)?;
        let mu = relative_eigenvalues(&g, &beta_eps)?;
        let vol = fact * g.determinant() * w;
        let prod_lambda = lambda.product();
        let trace_gamma_alpha = lambda.sum();
        let trace_gamma_beta = mu.sum();
        let trace_alpha_beta = relative_trace(&at, &beta_eps)?;
        let predicted = c_eps * trace_gamma_beta / nf;
        translation = fmax(translation, fabs(prod_lambda - predicted) / predicted);
        int_a = int_a + (trace_gamma_alpha * trace_alpha_beta).sqrt() * prod_lambda.sqrt() * vol;
        int_b = int_b + trace_gamma_beta.sqrt() * prod_lambda.sqrt() * vol;
        int_c = int_c + sqrt_ratio * prod_lambda * vol;
        int_d = int_d + c_eps * trace_gamma_beta / nf * vol;
        int_norm = int_norm + trace_gamma_beta / nf * vol;
    }
    let inv_n2 = T::one() / (nf * nf);
    let chain_a = inv_n2 * int_a * int_a;
    let chain_b = inv_n2 * int_b * int_b;
    let chain_c = inv_n2 * int_c * int_c;
    let chain_d = int_d * int_d / (nf * c_eps);
    let chain_e = c_eps / nf;

    let mut flags = Vec::new();
    let ident = T::tol(IDENTITY_REL);
    let rel = |a: T, b: T| fabs(a - b) / fmax(T::one(), fmax(fabs(a), fabs(b)));
    if lhs_product < rhs - inequality_slack(lhs_product, rhs) {
        flags.push(format!(
            "estimate violated: lhs_product {} < c_eps/n {}",
            lhs_product, rhs
        ));
    }
    if lhs_product < chain_a - inequality_slack(lhs_product, chain_a) {
        flags.push("chain step (a) violated: lhs_product < chain_a".to_string());
    }
    if chain_a < chain_b - inequality_slack(chain_a, chain_b) {
        flags.push("chain step (b) violated: chain_a < chain_b".to_string());
    }
    for (name, x, y) in [
        ("(c)", chain_b, chain_c),
        ("(d)", chain_c, chain_d),
        ("(e)", chain_d, chain_e),
    ] {
        if rel(x, y) > ident {
            flags.push(format!(
                "chain identity {name} off by {:e}",
                rel(x, y).to_f64_lossy()
            ));
        }
    }
    if translation > ident {
        flags.push(format!(
            "pointwise eigenvalue identity off by {:e}",
            translation.to_f64_lossy()
        ));
    }
    if fabs(int_norm - T::one()) > T::tol(NORMALIZATION_ABS) {
        flags.push(format!("normalization integral is {}", int_norm));
    }
    if mass_defect > ident {
        flags.push(format!(
            "total mass changed by {:e}",
            mass_defect.to_f64_lossy()
        ));
    }
    if m_independence_defect > ident {
        flags.push(format!(
            "M_eps differs from the class value by {:e}",
            m_independence_defect.to_f64_lossy()
        ));
    }
    if solved.residual > cfg.residual_tol {
        flags.push(format!(
            "independent residual {:e} above tolerance",
            solved.residual.to_f64_lossy()
        ));
    }

    let report = EstimateReport {
        n,
        grid: grid.resolution(),
        epsilon: pair.epsilon,
        perturbed_gamma: gamma.is_perturbed(),
        gamma_scale,
        gauduchon_defect,
        c_eps,
        mass_defect,
        m_eps,
        m_eps_class,
        m_independence_defect,
        lhs_factor1,
        lhs_product,
        rhs,
        margin: lhs_product - rhs,
        chain_a,
        chain_b,
        chain_c,
        chain_d,
        chain_e,
        pointwise_translation_defect: translation,
        normalization_check: int_norm,
        solve: solved.summary(),
        pass: flags.is_empty(),
        flags,
    };
    Ok((report, solved))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::{random_positive_definite, seeded_rng};

    type H = HermitianForm<f64>;

    fn cfg() -> SolverConfig<f64> {
        SolverConfig::default()
    }

    #[test]
    fn identity_case_is_closed_form() {
        let i = H::identity(2);
        let pair = ClassPair::new(i.clone(), i.clone(), None, 0.0).unwrap();
        let grid = TorusGrid::new(2, 8).unwrap();
        let r = run_estimate(&pair, &Gamma::Constant(i), &grid, &cfg()).unwrap();
        assert!(r.pass, "{:?}", r.flags);
        assert!((r.gamma_scale - 0.5).abs() < 1e-12);
        assert!((r.c_eps - 2.0).abs() < 1e-12);
        assert!((r.lhs_factor1 - 1.0).abs() < 1e-12);
        assert!((r.m_eps - 2.0).abs() < 1e-12);
        assert!((r.lhs_product - 2.0).abs() < 1e-12);
        assert!((r.rhs - 1.0).abs() < 1e-12);
        assert!(r.solve.u_max.abs() < 1e-14 && r.solve.u_min.abs() < 1e-14);
        // λ = (2, 2), Λ_γ α̃ = 4, Λ_α̃ β = 2, γ² = 1/2: only step (a) is strict.
        assert!((r.chain_a - 2.0).abs() < 1e-10);
        for v in [r.chain_b, r.chain_c, r.chain_d, r.chain_e] {
            assert!((v - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn vanishing_beta_reduces_to_determinants() {
        let alpha = H::diag(&[2.0, 1.0]);
        let gamma = H::diag(&[1.0, 3.0]);
        let eps = 0.1;
        let pair = ClassPair::new(alpha, H::zero(2), None, eps).unwrap();
        let grid = TorusGrid::new(2, 8).unwrap();
        let r = run_estimate(&pair, &Gamma::Constant(gamma), &grid, &cfg()).unwrap();
        assert!(r.pass, "{:?}", r.flags);
        // β_ε = εI; M_ε = 2·D(diag(2+ε, 1+ε), εI) = ε(3 + 2ε).
        assert!((r.m_eps - eps * (3.0 + 2.0 * eps)).abs() < 1e-12);
        assert!((r.c_eps - 2.0 * (2.0 + eps) * (1.0 + eps)).abs() < 1e-12);
        // ∫β_ε∧γ = ε·(1 + 3) → s = 1/(4ε); ∫α_ε∧sγ = s·((2+ε)·3 + (1+ε)).
        let s = 1.0 / (4.0 * eps);
        assert!((r.lhs_factor1 - s * (3.0 * (2.0 + eps) + 1.0 + eps)).abs() < 1e-10);
        assert!(r.margin >= 0.0);
    }

    #[test]
    fn random_pair_with_perturbed_gamma() {
        let mut rng = seeded_rng(7);
        let alpha: H = random_positive_definite(2, &mut rng);
        let beta: H = random_positive_definite(2, &mut rng);
        let base: H = random_positive_definite(2, &mut rng);
        let pair = ClassPair::new(alpha, beta, None, 0.05).unwrap();
        let grid = TorusGrid::new(2, 16).unwrap();
        let g: PotentialField<f64> = random_log_factor(&grid, 0.3, &mut rng);
        assert!(g.values().iter().fold(0.0f64, |m, v: &f64| m.max(v.abs())) <= 0.3 + 1e-12);
        let gamma = Gamma::Conformal {
            base,
            log_factor: g,
        };
        let r = run_estimate(&pair, &gamma, &grid, &cfg()).unwrap();
        assert!(r.pass, "{:?}", r.flags);
        assert!(r.perturbed_gamma);
        assert!(r.solve.u_max.abs() < 1e-14 && r.solve.u_min < -1e-6);
        assert!(r.pointwise_translation_defect <= 1e-8);
        assert!(r.chain_a >= r.chain_b - 1e-9 && r.lhs_product >= r.chain_a - 1e-9);
    }

    #[test]
    fn rejects_mismatched_and_one_dimensional_inputs() {
        let i2 = H::identity(2);
        let pair = ClassPair::new(i2.clone(), i2.clone(), None, 0.1).unwrap();
        let grid3 = TorusGrid::new(3, 8).unwrap();
        assert!(run_estimate(&pair, &Gamma::Constant(i2.clone()), &grid3, &cfg()).is_err());
        let i1 = H::identity(1);
        let p1 = ClassPair::new(i1.clone(), i1.clone(), None, 0.1).unwrap();
        let grid1 = TorusGrid::new(1, 8).unwrap();
        assert!(run_estimate(&p1, &Gamma::Constant(i1), &grid1, &cfg()).is_err());
    }
}
