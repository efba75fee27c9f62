use std::sync::Arc;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{run_estimate, ClassPair, EstimateReport, Gamma};
use crate::error::{usage, Result};
use crate::hermitian::{intersection_number, HermitianForm};
use crate::monge_ampere::SolverConfig;
use crate::scalar::{fabs, fmax, Real};
use crate::tolerances::{inequality_slack, MONOTONE};
use crate::torus::TorusGrid;

/// Relative tolerance of the extrapolated limits against the exact values.
pub const EXTRAPOLATION_REL: f64 = 1e-6;

/// Per-ε reports plus the limit checks as `ε ↓ 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct SweepReport<T: Real> {
    pub reports: Vec<EstimateReport<T>>,
    pub c_monotone: bool,
    pub m_monotone: bool,
    /// `n! det α`.
    pub c0_exact: T,
    /// `n! D(α, …, α, β)`.
    pub m0_exact: T,
    pub c0_extrapolated: T,
    pub m0_extrapolated: T,
    /// Whether `c₀ − n M₀ ≤ 0`, the regime in which `M_ε ≥ c_ε/n` must hold for all ε.
    pub bound_applies: bool,
    /// `min_ε (M_ε − c_ε/n)`.
    pub min_bound_margin: T,
    pub flags: Vec<String>,
    pub pass: bool,
}

/// Value at `0` of the polynomial interpolating `(xs[i], ys[i])`.
pub fn neville_at_zero<T: Real>(xs: &[T], ys: &[T]) -> T {
    let mut p = ys.to_vec();
    let k = p.len();
    for level in 1..k {
        for i in 0..k - level {
            let (xi, xj) = (xs[i], xs[i + level]);
            p[i] = (xj * p[i] - xi * p[i + 1]) / (xj - xi);
        }
    }
    p.first().copied().unwrap_or_else(T::nan)
}

/// Runs the estimate for each ε (concurrently) and checks monotonicity and limits.
pub fn sweep_epsilon<T: Real>(
    pair: &ClassPair<T>,
    gamma: &Gamma<T>,
    eps: &[T],
    grid: &Arc<TorusGrid<T>>,
    cfg: &SolverConfig<T>,
) -> Result<SweepReport<T>> {
    if eps.is_empty() {
        return usage("epsilon sweep needs at least one value");
    }
    if eps.iter().any(|e| !(*e > T::zero())) {
        return usage("epsilon sweep values must be positive");
    }
    if eps.windows(2).any(|w| !(w[1] < w[0])) {
        return usage("epsilon sweep values must be strictly decreasing");
    }
    let pairs: Vec<ClassPair<T>> = eps
        .iter()
        .map(|e| pair.with_epsilon(*e))
        .collect::<Result<_>>()?;
    let reports: Vec<EstimateReport<T>> = pairs
        .par_iter()
        .map(|p| run_estimate(p, gamma, grid, cfg))
        .collect::<Result<_>>()?;

    let n = pair.dim();
    let nf = T::from_usize_lossy(n);
    let top: Vec<&HermitianForm<T>> = (0..n).map(|_| &pair.alpha).collect();
    let mut mixed: Vec<&HermitianForm<T>> = (1..n).map(|_| &pair.alpha).collect();
    mixed.push(&pair.beta);
    let c0_exact = intersection_number(&top)?;
    let m0_exact = intersection_number(&mixed)?;

    let mut flags = Vec::new();
    let non_increasing = |vals: &[T]| {
        vals.windows(2)
            .all(|w| w[1] <= w[0] + T::tol(MONOTONE) * fmax(T::one(), fabs(w[0])))
    };
    let cs: Vec<T> = reports.iter().map(|r| r.c_eps).collect();
    let ms: Vec<T> = reports.iter().map(|r| r.m_eps).collect();
    let c_monotone = non_increasing(&cs);
    let m_monotone = non_increasing(&ms);
    if !c_monotone {
        flags.push("c_eps increases along the sweep".to_string());
    }
    if !m_monotone {
        flags.push("M_eps increases along the sweep".to_string());
    }

    let tail = reports.len().saturating_sub(n + 1);
    let c0_extrapolated = neville_at_zero(&eps[tail..], &cs[tail..]);
    let m0_extrapolated = neville_at_zero(&eps[tail..], &ms[tail..]);
    // Fewer than n + 1 points cannot pin a degree-n polynomial; only compare with enough data.
    if reports.len() > n {
        let scale_c = fmax(T::one(), fabs(c0_exact));
        if fabs(c0_extrapolated - c0_exact) > T::tol(EXTRAPOLATION_REL) * scale_c {
            flags.push(format!(
                "extrapolated c_0 {} differs from exact {}",
                c0_extrapolated, c0_exact
            ));
        }
        if fabs(m0_extrapolated - m0_exact)
            > T::tol(EXTRAPOLATION_REL) * fmax(scale_c, fabs(m0_exact))
        {
            flags.push(format!(
                "extrapolated M_0 {} differs from exact {}",
                m0_extrapolated, m0_exact
            ));
        }
    }

    let bound_applies = c0_exact - nf * m0_exact <= inequality_slack(c0_exact, nf * m0_exact);
    let mut min_bound_margin = T::infinity();
    for r in &reports {
        let margin = r.m_eps - r.c_eps / nf;
        if margin < min_bound_margin {
            min_bound_margin = margin;
        }
        if bound_applies && margin < -inequality_slack(r.m_eps, r.c_eps / nf) {
            flags.push(format!(
                "M_eps {} < c_eps/n {} at eps {}",
                r.m_eps,
                r.c_eps / nf,
                r.epsilon
            ));
        }
    }
    for r in &reports {
        if !r.pass {
            flags.push(format!("estimate report at eps {} is flagged", r.epsilon));
        }
    }

    Ok(SweepReport {
        reports,
        c_monotone,
        m_monotone,
        c0_exact,
        m0_exact,
        c0_extrapolated,
        m0_extrapolated,
        bound_applies,
        min_bound_margin,
        pass: flags.is_empty(),
        flags,
    })
}
