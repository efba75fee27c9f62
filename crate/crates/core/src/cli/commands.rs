use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use super::report::{append_summary, write_blob, write_report, SummaryRow};
use super::{Flags, Scenario};
use crate::error::{Error, Result};
use crate::estimate::{
    random_log_factor, run_estimate, sweep_epsilon, ClassPair, EstimateReport, Gamma, SweepReport,
};
use crate::hermitian::{
    check_trace_product_inequality, random_positive_definite, seeded_rng, HermitianForm,
    TraceProductWitness,
};
use crate::monge_ampere::{ma_residual, solve_ma as solve, Residual, SolveSummary, SolverConfig};
use crate::oracle::{
    psef_dual_test, optimality_search, theorem_check, DualTestOutcome, OptimalityOutcome,
};
use crate::torus::{integrate_top, io, Factor, FormField, TorusGrid};

const DEFAULT_GRID: usize = 16;
const DEFAULT_SAMPLES: usize = 10_000;

fn load(flags: &Flags) -> Result<Scenario> {
    match &flags.scenario {
        Some(p) => Scenario::load(p),
        None => Ok(Scenario::default()),
    }
}

fn required<T>(v: Option<T>, what: &str) -> Result<T> {
    v.ok_or_else(|| Error::Usage(format!("missing {what}")))
}

fn scenario_id(s: &Scenario, fallback: &str) -> String {
    s.id.clone().unwrap_or_else(|| fallback.to_string())
}

fn solver_config(s: &Scenario, flags: &Flags) -> Result<SolverConfig<f64>> {
    let mut cfg = s.solver.clone().unwrap_or_default();
    if let Some(t) = flags.tol {
        cfg.residual_tol = t;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn dimension(s: &Scenario, flags: &Flags, forms: &[Option<&HermitianForm<f64>>]) -> Result<usize> {
    let from_forms = forms.iter().flatten().map(|f| f.dim()).next();
    let n = flags
        .n
        .or(s.n)
        .or(from_forms)
        .ok_or_else(|| Error::Usage("missing --n or field `n`".into()))?;
    for f in forms.iter().flatten() {
        if f.dim() != n {
            return Err(Error::Usage(format!(
                "matrix of size {} does not match n = {n}",
                f.dim()
            )));
        }
    }
    Ok(n)
}

#[derive(Serialize)]
struct SolveBody<'a> {
    n: usize,
    grid: usize,
    background: &'a HermitianForm<f64>,
    solve: SolveSummary<f64>,
    residual_check: Residual<f64>,
    /// `|∫(B + i∂∂̄u)ⁿ − ∫Bⁿ| / ∫Bⁿ`.
    mass_defect: f64,
}

pub fn solve_ma(flags: &Flags) -> Result<bool> {
    let s = load(flags)?;
    let n = dimension(&s, flags, &[s.background.as_ref()])?;
    let res = flags.grid.or(s.grid).unwrap_or(DEFAULT_GRID);
    let grid = TorusGrid::new(n, res)?;
    let seed = flags.seed.or(s.seed).unwrap_or(0);
    let background = s
        .background
        .clone()
        .unwrap_or_else(|| HermitianForm::identity(n));
    let density = required(s.density.as_ref(), "field `density`")?.sample(&grid, seed)?;
    let cfg = solver_config(&s, flags)?;
    let bg = FormField::constant(grid.clone(), &background)?;
    let out = solve(&bg, &density, &cfg)?;
    let check = ma_residual(&bg, &out.u, &density, out.constant_c)?;
    let solved = out.solved_form(&bg)?;
    let mass = integrate_top(&vec![Factor::from(&solved); n])?;
    let mass0 = integrate_top(&vec![Factor::from(&background); n])?;
    let mass_defect = (mass - mass0).abs() / mass0.abs();
    let pass = check.positive
        && check.max <= cfg.residual_tol
        && out.positivity_margin > 0.0
        && mass_defect <= 1e-8;

    let id = scenario_id(&s, "solve-ma");
    let body = SolveBody {
        n,
        grid: res,
        background: &background,
        solve: out.summary(),
        residual_check: check,
        mass_defect,
    };
    write_report(&flags.out, "solve-ma", &id, Some(seed), pass, &body)?;
    let row = SummaryRow {
        id,
        n,
        grid: res,
        c_eps: Some(out.constant_c),
        margin: Some(out.positivity_margin),
        residual: Some(check.max),
        pass,
        ..Default::default()
    };
    append_summary(&flags.out, &[row])?;
    let mut blob = Vec::new();
    io::write_potential(&mut blob, &out.u)?;
    write_blob(&flags.out, "u.bin", &blob)?;
    Ok(pass)
}

/// Metrics of a scenario: the explicit list, then seeded random ones.
fn gammas(
    s: &Scenario,
    n: usize,
    grid: &Arc<TorusGrid<f64>>,
    seed: u64,
) -> Result<Vec<Gamma<f64>>> {
    let mut out: Vec<Gamma<f64>> = s.gamma.iter().cloned().map(Gamma::Constant).collect();
    for g in &s.gamma {
        if g.dim() != n {
            return Err(Error::Usage(format!(
                "field `gamma` has a matrix of size {}, expected {n}",
                g.dim()
            )));
        }
    }
    if let Some(r) = &s.random_gammas {
        if !(r.perturbation >= 0.0) {
            return Err(Error::Usage(
                "field `random_gammas.perturbation` must be non-negative".into(),
            ));
        }
        let mut rng = seeded_rng(seed);
        for i in 0..r.count {
            let base: HermitianForm<f64> = random_positive_definite(n, &mut rng);
            let perturb = r.perturbation > 0.0 && (!r.alternate || i % 2 == 1);
            out.push(if perturb {
                Gamma::Conformal {
                    base,
                    log_factor: random_log_factor(grid, r.perturbation, &mut rng),
                }
            } else {
                Gamma::Constant(base)
            });
        }
    }
    if out.is_empty() {
        out.push(Gamma::Constant(HermitianForm::identity(n)));
    }
    Ok(out)
}

#[derive(Serialize)]
struct EstimateBody<'a> {
    n: usize,
    grid: usize,
    alpha: &'a HermitianForm<f64>,
    beta: &'a HermitianForm<f64>,
    eps: &'a [f64],
    #[serde(skip_serializing_if = "Vec::is_empty")]
    estimates: Vec<EstimateReport<f64>>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    sweeps: Vec<SweepReport<f64>>,
}

fn row(id: String, r: &EstimateReport<f64>) -> SummaryRow {
    SummaryRow {
        id,
        n: r.n,
        grid: r.grid,
        eps: Some(r.epsilon),
        c_eps: Some(r.c_eps),
        m_eps: Some(r.m_eps),
        lhs_product: Some(r.lhs_product),
        rhs: Some(r.rhs),
        margin: Some(r.margin),
        residual: Some(r.solve.residual),
        pass: r.pass,
    }
}

pub fn verify_estimate(flags: &Flags) -> Result<bool> {
    let s = load(flags)?;
    let alpha = required(s.alpha.clone(), "field `alpha`")?;
    let beta = required(s.beta.clone(), "field `beta`")?;
    let n = dimension(&s, flags, &[Some(&alpha), Some(&beta), s.omega.as_ref()])?;
    let res = flags.grid.or(s.grid).unwrap_or(DEFAULT_GRID);
    let grid = TorusGrid::new(n, res)?;
    let seed = flags.seed.or(s.seed).unwrap_or(0);
    let eps = flags
        .eps
        .clone()
        .or(s.eps.clone())
        .ok_or_else(|| Error::Usage("missing --eps or field `eps`".into()))?;
    if eps.is_empty() {
        return Err(Error::Usage("field `eps` is empty".into()));
    }
    let cfg = solver_config(&s, flags)?;
    let pair = ClassPair::new(alpha.clone(), beta.clone(), s.omega.clone(), eps[0])?;
    let metrics = gammas(&s, n, &grid, seed)?;
    let id = scenario_id(&s, "verify-estimate");

    let mut body = EstimateBody {
        n,
        grid: res,
        alpha: &alpha,
        beta: &beta,
        eps: &eps,
        estimates: vec![],
        sweeps: vec![],
    };
    let mut rows = Vec::new();
    if eps.len() == 1 {
        body.estimates = metrics
            .par_iter()
            .map(|g| run_estimate(&pair, g, &grid, &cfg))
            .collect::<Result<_>>()?;
        for (i, r) in body.estimates.iter().enumerate() {
            rows.push(row(format!("{id}/g{i}"), r));
        }
    } else {
        body.sweeps = metrics
            .iter()
            .map(|g| sweep_epsilon(&pair, g, &eps, &grid, &cfg))
            .collect::<Result<_>>()?;
        for (i, sw) in body.sweeps.iter().enumerate() {
            rows.extend(sw.reports.iter().map(|r| row(format!("{id}/g{i}"), r)));
        }
    }
    let pass = body.estimates.iter().all(|r| r.pass) && body.sweeps.iter().all(|s| s.pass);
    write_report(&flags.out, "verify-estimate", &id, Some(seed), pass, &body)?;
    append_summary(&flags.out, &rows)?;
    Ok(pass)
}

pub fn check_theorem(flags: &Flags) -> Result<bool> {
    let n = required(flags.n, "--n")?;
    let samples = flags.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = flags.seed.unwrap_or(0);
    let r = theorem_check::<f64>(n, samples, seed)?;
    let pass = r.counterexamples.is_empty();
    write_report(
        &flags.out,
        "check-theorem",
        &format!("theorem-n{n}"),
        Some(seed),
        pass,
        &r,
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct OptimalityBody {
    n: usize,
    c: f64,
    #[serde(flatten)]
    outcome: OptimalityOutcome<f64>,
}

/// A witness for `c < n` is the expected outcome; one for `c = n` would contradict the theorem.
pub fn search_optimality(flags: &Flags) -> Result<bool> {
    let n = required(flags.n, "--n")?;
    let c = required(flags.c, "--c")?;
    let seed = flags.seed.unwrap_or(0);
    let outcome = optimality_search::<f64>(n, c, seed)?;
    let pass = !(outcome.witness().is_some() && c >= n as f64);
    let body = OptimalityBody { n, c, outcome };
    write_report(
        &flags.out,
        "search-optimality",
        &format!("optimality-n{n}"),
        Some(seed),
        pass,
        &body,
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct FuzzBody {
    n: usize,
    samples: usize,
    /// `min (lhs − rhs) / max(1, |lhs|, |rhs|)`.
    min_relative_slack: f64,
    violations: Vec<FuzzViolation>,
}

#[derive(Serialize)]
struct FuzzViolation {
    index: usize,
    a: HermitianForm<f64>,
    b: HermitianForm<f64>,
    c: HermitianForm<f64>,
    witness: TraceProductWitness<f64>,
}

pub fn fuzz_traces(flags: &Flags) -> Result<bool> {
    let n = required(flags.n, "--n")?;
    if n == 0 {
        return Err(Error::Usage("--n must be at least 1".into()));
    }
    let samples = flags.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = flags.seed.unwrap_or(0);
    let mut rng = seeded_rng(seed);
    let mut min_relative_slack = f64::INFINITY;
    let mut violations = Vec::new();
    for index in 0..samples {
        let a: HermitianForm<f64> = random_positive_definite(n, &mut rng);
        let b: HermitianForm<f64> = random_positive_definite(n, &mut rng);
        let c: HermitianForm<f64> = random_positive_definite(n, &mut rng);
        let w = check_trace_product_inequality(&a, &b, &c)?;
        min_relative_slack =
            min_relative_slack.min((w.lhs - w.rhs) / 1f64.max(w.lhs.abs()).max(w.rhs.abs()));
        if !w.holds {
            violations.push(FuzzViolation {
                index,
                a,
                b,
                c,
                witness: w,
            });
        }
    }
    let pass = violations.is_empty();
    let body = FuzzBody {
        n,
        samples,
        min_relative_slack,
        violations,
    };
    write_report(
        &flags.out,
        "fuzz-traces",
        &format!("traces-n{n}"),
        Some(seed),
        pass,
        &body,
    )?;
    Ok(pass)
}

#[derive(Serialize)]
struct DualBody<'a> {
    alpha: &'a HermitianForm<f64>,
    alpha_psd: bool,
    #[serde(flatten)]
    outcome: DualTestOutcome<f64>,
}

/// Only a psd form with a negative sampled pairing is a violation.
pub fn dual_test(flags: &Flags) -> Result<bool> {
    let s = load(flags)?;
    let alpha = required(s.alpha.clone(), "field `alpha`")?;
    let samples = flags.samples.unwrap_or(DEFAULT_SAMPLES);
    let seed = flags.seed.or(s.seed).unwrap_or(0);
    let outcome = psef_dual_test(&alpha, samples, seed)?;
    let alpha_psd = alpha.is_positive_semidefinite();
    let pass = !alpha_psd || outcome.psef_sampled;
    let id = scenario_id(&s, "dual-test");
    write_report(
        &flags.out,
        "dual-test",
        &id,
        Some(seed),
        pass,
        &DualBody {
            alpha: &alpha,
            alpha_psd,
            outcome,
        },
    )?;
    Ok(pass)
}
