use std::sync::Arc;

use num_complex::Complex;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::krylov::gmres;
use crate::error::{domain, usage, Error, Result};
use crate::hermitian::dense;
use crate::scalar::{fabs, factorial, fmax, Real};
use crate::tolerances::RESIDUAL;
use crate::torus::{
    hessian_from_spectrum, i_ddbar, integrate, integrate_top, FormField, PotentialField, TorusGrid,
};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(
    bound(serialize = "T: Real", deserialize = "T: Real"),
    default,
    deny_unknown_fields
)]
pub struct SolverConfig<T> {
    /// Max-norm of the log-residual accepted as converged.
    pub residual_tol: T,
    pub max_newton_iters: usize,
    /// Line-search halvings per Newton step.
    pub max_halvings: usize,
    /// Relative residual target of each linearized solve.
    pub inner_tol: T,
    /// Krylov iteration cap per Newton step; `None` means `10 · nodes`.
    pub inner_max_iters: Option<usize>,
    pub restart: usize,
}

impl<T: Real> Default for SolverConfig<T> {
    fn default() -> Self {
        Self {
            residual_tol: T::tol(RESIDUAL),
            max_newton_iters: 50,
            max_halvings: 30,
            inner_tol: T::tol(1e-10),
            inner_max_iters: None,
            restart: 60,
        }
    }
}

impl<T: Real> SolverConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > T::zero()) || !(self.inner_tol > T::zero()) {
            return usage("solver tolerances must be positive");
        }
        if self.max_newton_iters == 0 || self.restart == 0 || self.inner_max_iters == Some(0) {
            return usage("solver iteration caps must be at least 1");
        }
        Ok(())
    }
}

/// Converged solve of `(B + i∂∂̄u)ⁿ = C · density`.
#[derive(Clone, Debug)]
pub struct SolveResult<T: Real> {
    /// Sup-zero normalized potential.
    pub u: PotentialField<T>,
    pub constant_c: T,
    /// Independent [`ma_residual`] of the returned solution.
    pub residual: T,
    pub newton_iters: usize,
    /// Smallest eigenvalue of `B + i∂∂̄u` over the grid.
    pub positivity_margin: T,
    pub residual_history: Vec<T>,
    pub krylov_iters: usize,
    /// Largest relative residual left by any linearized solve.
    pub worst_inner_residual: T,
}

/// Scalar part of a [`SolveResult`], as written to reports.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct SolveSummary<T> {
    #[serde(rename = "constant_C")]
    pub constant_c: T,
    pub residual: T,
    pub newton_iters: usize,
    pub positivity_margin: T,
    pub residual_history: Vec<T>,
    pub krylov_iters: usize,
    pub worst_inner_residual: T,
    pub u_max: T,
    pub u_min: T,
}

impl<T: Real> SolveResult<T> {
    pub fn summary(&self) -> SolveSummary<T> {
        let u_min = self
            .u
            .values()
            .iter()
            .fold(T::infinity(), |a, b| if *b < a { *b } else { a });
        SolveSummary {
            constant_c: self.constant_c,
            residual: self.residual,
            newton_iters: self.newton_iters,
            positivity_margin: self.positivity_margin,
            residual_history: self.residual_history.clone(),
            krylov_iters: self.krylov_iters,
            worst_inner_residual: self.worst_inner_residual,
            u_max: self.u.max(),
            u_min,
        }
    }

    /// `B + i∂∂̄u` for the background the solve was run with.
    pub fn solved_form(&self, background: &FormField<T>) -> Result<FormField<T>> {
        background.add(&i_ddbar(&self.u))
    }
}

/// Pointwise evaluation of the current iterate.
struct State<T> {
    /// `log det A - target` per node.
    defect: Vec<T>,
    det: Vec<T>,
    /// `det(A) · A⁻¹` per node, row-major.
    cofactor: Vec<Complex<T>>,
    residual: T,
}

fn evaluate<T: Real>(
    background: &FormField<T>,
    hessian: &[Complex<T>],
    step: Option<(&[Complex<T>], T)>,
    target: &[T],
) -> Option<State<T>> {
    let n = background.dim();
    let nn = n * n;
    let nodes = target.len();
    let mut defect = Vec::with_capacity(nodes);
    let mut det = Vec::with_capacity(nodes);
    let mut cofactor = Vec::with_capacity(nodes * nn);
    let mut residual = T::zero();
    let mut a = vec![Complex::zero(); nn];
    for node in 0..nodes {
        let bg = background.node_entries(node);
        for e in 0..nn {
            let mut v = bg[e] + hessian[node * nn + e];
            if let Some((dir, t)) = step {
                v = v + dir[node * nn + e] * t;
            }
            a[e] = v;
        }
        let l = dense::cholesky(&a, n)?;
        let logdet = dense::cholesky_logdet(&l, n);
        let d = logdet.exp();
        let inv = dense::inverse_from_cholesky(&l, n);
        let f = logdet - target[node];
        residual = fmax(residual, fabs(f));
        defect.push(f);
        det.push(d);
        cofactor.extend(inv.iter().map(|x| *x * d));
    }
    Some(State {
        defect,
        det,
        cofactor,
        residual,
    })
}

/// `v ↦ P_band( Σ_jk Q_kj ∂_j∂̄_k v )` with `Q = det(A) A⁻¹`.
fn apply_linearization<T: Real>(
    grid: &Arc<TorusGrid<T>>,
    cofactor: &[Complex<T>],
    v: &[T],
    out: &mut [T],
) {
    let n = grid.complex_dim();
    let nn = n * n;
    let spec = grid.fft_real(v);
    out.iter_mut().for_each(|o| *o = T::zero());
    let mut buf = vec![Complex::zero(); grid.nodes()];
    for j in 0..n {
        for k in j..n {
            for (idx, (b, s)) in buf.iter_mut().zip(&spec).enumerate() {
                *b = *s * grid.ddbar_symbol(j, k, idx);
            }
            grid.ifft(&mut buf);
            for (node, (o, h)) in out.iter_mut().zip(&buf).enumerate() {
                let q = &cofactor[node * nn..(node + 1) * nn];
                let contrib = if j == k {
                    (q[k * n + j] * h.re).re
                } else {
                    // H_kj = conj(H_jk)
                    (q[k * n + j] * *h + q[j * n + k] * h.conj()).re
                };
                *o = *o + contrib;
            }
        }
    }
    grid.project_band(out);
}

/// Frequency-space inverse of the constant-coefficient operator built from
/// the grid mean of `Q`.
fn preconditioner_symbol<T: Real>(grid: &Arc<TorusGrid<T>>, cofactor: &[Complex<T>]) -> Vec<T> {
    let n = grid.complex_dim();
    let nn = n * n;
    let mut mean = vec![Complex::zero(); nn];
    for chunk in cofactor.chunks(nn) {
        for (m, q) in mean.iter_mut().zip(chunk) {
            *m = *m + *q;
        }
    }
    let w = grid.weight();
    mean.iter_mut().for_each(|m| *m = *m * w);
    (0..grid.nodes())
        .map(|idx| {
            if idx == 0 || grid.is_nyquist(idx) {
                return T::zero();
            }
            let mut s = Complex::zero();
            for j in 0..n {
                for k in 0..n {
                    s = s + mean[k * n + j] * grid.ddbar_symbol(j, k, idx);
                }
            }
            if s.re == T::zero() {
                T::zero()
            } else {
                T::one() / s.re
            }
        })
        .collect()
}

fn apply_preconditioner<T: Real>(
    grid: &Arc<TorusGrid<T>>,
    inv_symbol: &[T],
    r: &[T],
    out: &mut [T],
) {
    let mut spec = grid.fft_real(r);
    spec.iter_mut()
        .zip(inv_symbol)
        .for_each(|(s, p)| *s = *s * *p);
    grid.ifft(&mut spec);
    out.iter_mut().zip(&spec).for_each(|(o, s)| *o = s.re);
}

fn check_inputs<T: Real>(background: &FormField<T>, density: &PotentialField<T>) -> Result<()> {
    if **background.grid() != **density.grid() {
        return usage("background and density live on different grids");
    }
    for (node, d) in density.values().iter().enumerate() {
        if !(*d > T::zero()) || !d.is_finite() {
            return domain(format!(
                "density must be strictly positive: node {node} has value {}",
                d.to_f64_lossy()
            ));
        }
    }
    let n = background.dim();
    for node in 0..background.grid().nodes() {
        if dense::cholesky(background.node_entries(node), n).is_none() {
            return domain(format!(
                "background is not positive definite at node {node} (smallest eigenvalue {:e})",
                background.node(node).min_eigenvalue().to_f64_lossy()
            ));
        }
    }
    Ok(())
}

/// Solves `(background + i∂∂̄u)ⁿ = C · density` for `u` (sup-zero) and `C`.
pub fn solve_ma<T: Real>(
    background: &FormField<T>,
    density: &PotentialField<T>,
    cfg: &SolverConfig<T>,
) -> Result<SolveResult<T>> {
    cfg.validate()?;
    check_inputs(background, density)?;
    let grid = background.grid().clone();
    let n = background.dim();
    let nodes = grid.nodes();

    let factors: Vec<_> = (0..n).map(|_| background.into()).collect();
    let mass = integrate_top(&factors)?;
    let constant_c = mass / integrate(density);
    let log_fact = factorial::<T>(n).ln();
    let target: Vec<T> = density
        .values()
        .iter()
        .map(|d| (constant_c * *d).ln() - log_fact)
        .collect();

    let mut u = vec![T::zero(); nodes];
    let mut hessian = vec![Complex::zero(); nodes * n * n];
    let mut state = evaluate(background, &hessian, None, &target)
        .ok_or_else(|| Error::Domain("background lost positivity".into()))?;
    let mut history = vec![state.residual];
    let inner_cap = cfg.inner_max_iters.unwrap_or(10 * nodes);
    let mut krylov_iters = 0;
    let mut worst_inner_residual = T::zero();
    let mut iters = 0;

    while state.residual > cfg.residual_tol {
        if iters == cfg.max_newton_iters {
            return Err(Error::NonConvergence {
                iters,
                residual: state.residual.to_f64_lossy(),
            });
        }
        let mut rhs: Vec<T> = state
            .defect
            .iter()
            .zip(&state.det)
            .map(|(f, d)| -*f * *d)
            .collect();
        grid.project_band(&mut rhs);
        let inv_symbol = preconditioner_symbol(&grid, &state.cofactor);
        let outcome = gmres(
            |v, out| apply_linearization(&grid, &state.cofactor, v, out),
            |r, out| apply_preconditioner(&grid, &inv_symbol, r, out),
            &rhs,
            cfg.inner_tol,
            cfg.restart,
            inner_cap,
        );
        krylov_iters += outcome.iterations;
        worst_inner_residual = fmax(worst_inner_residual, outcome.relative_residual);
        let direction = outcome.x;
        let dir_hessian = hessian_from_spectrum(&grid, &grid.fft_real(&direction));

        let mut step = T::one();
        let mut accepted = None;
        let mut lost_positivity = false;
        for _ in 0..=cfg.max_halvings {
            match evaluate(
                background,
                &hessian,
                Some((dir_hessian.entries(), step)),
                &target,
            ) {
                Some(trial) if trial.residual < state.residual => {
                    accepted = Some(trial);
                    break;
                }
                Some(_) => lost_positivity = false,
                None => lost_positivity = true,
            }
            step = step * T::lit(0.5);
        }
        iters += 1;
        let Some(trial) = accepted else {
            let iterate = u.iter().map(|v| v.to_f64_lossy()).collect();
            return Err(if lost_positivity {
                Error::SolverFailure {
                    reason: "line search could not keep the form positive definite".into(),
                    iters,
                    residual: state.residual.to_f64_lossy(),
                    iterate,
                }
            } else {
                Error::SolverFailure {
                    reason: "line search found no residual decrease".into(),
                    iters,
                    residual: state.residual.to_f64_lossy(),
                    iterate,
                }
            });
        };
        u.iter_mut()
            .zip(&direction)
            .for_each(|(ui, di)| *ui = *ui + step * *di);
        hessian
            .iter_mut()
            .zip(dir_hessian.entries())
            .for_each(|(h, d)| *h = *h + *d * step);
        state = trial;
        history.push(state.residual);
    }

    let u = PotentialField::new(grid.clone(), u)?.with_sup_zero();
    let solved = background.add(&i_ddbar(&u))?;
    let positivity_margin = solved.min_eigenvalue();
    let check = ma_residual(background, &u, density, constant_c)?;
    Ok(SolveResult {
        u,
        constant_c,
        residual: check.max,
        newton_iters: iters,
        positivity_margin,
        residual_history: history,
        krylov_iters,
        worst_inner_residual,
    })
}

/// Outcome of an independent residual evaluation.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound(serialize = "T: Real", deserialize = "T: Real"))]
pub struct Residual<T> {
    /// `max |log(n! det(B + i∂∂̄u)) − log(C·density)|`, `+∞` at a non-positive node.
    pub max: T,
    /// Node attaining the maximum.
    pub node: usize,
    pub positive: bool,
}

/// Independent check of a candidate solution: eigenvalue positivity test and
/// LU determinant per node, no shared state with the Newton iteration.
pub fn ma_residual<T: Real>(
    background: &FormField<T>,
    u: &PotentialField<T>,
    density: &PotentialField<T>,
    constant_c: T,
) -> Result<Residual<T>> {
    if **background.grid() != **u.grid() || **u.grid() != **density.grid() {
        return usage("background, potential and density must share a grid");
    }
    let n = background.dim();
    let log_fact = factorial::<T>(n).ln();
    let form = background.add(&i_ddbar(u))?;
    let mut out = Residual {
        max: T::zero(),
        node: 0,
        positive: true,
    };
    for node in 0..form.grid().nodes() {
        let d = density.values()[node];
        if !(d > T::zero()) {
            return domain(format!(
                "density must be strictly positive: node {node} has value {}",
                d.to_f64_lossy()
            ));
        }
        let a = form.node(node);
        if !(a.min_eigenvalue() > T::zero()) {
            return Ok(Residual {
                max: T::infinity(),
                node,
                positive: false,
            });
        }
        let det = dense::determinant(a.entries(), n).re;
        let r = fabs(det.ln() + log_fact - (constant_c * d).ln());
        if r > out.max {
            out.max = r;
            out.node = node;
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hermitian::HermitianForm;
    use std::f64::consts::PI;

    fn grid(n: usize, res: usize) -> Arc<TorusGrid<f64>> {
        TorusGrid::new(n, res).unwrap()
    }

    #[test]
    fn constant_data_is_a_fixed_point() {
        let g = grid(2, 8);
        let bg = FormField::constant(g.clone(), &HermitianForm::identity(2)).unwrap();
        let dens = PotentialField::from_fn(g, |_| 1.0);
        let r = solve_ma(&bg, &dens, &SolverConfig::default()).unwrap();
        assert_eq!(r.newton_iters, 0);
        assert!((r.constant_c - 2.0).abs() < 1e-14);
        assert!(r.u.values().iter().all(|v| v.abs() < 1e-15));
        assert!(r.residual < 1e-12);
    }

    #[test]
    fn constant_ratio_density() {
        let g = grid(1, 16);
        let bg = FormField::constant(g.clone(), &HermitianForm::diag(&[3.0])).unwrap();
        let dens = PotentialField::from_fn(g, |_| 0.5);
        let r = solve_ma(&bg, &dens, &SolverConfig::default()).unwrap();
        assert!((r.constant_c - 6.0).abs() < 1e-13);
        assert!(r.u.values().iter().all(|v| v.abs() < 1e-15));
    }

    #[test]
    fn rejects_bad_inputs() {
        let g = grid(1, 8);
        let bg = FormField::constant(g.clone(), &HermitianForm::identity(1)).unwrap();
        let dens = PotentialField::from_fn(g.clone(), |c| 1.0 + (2.0 * PI * c[0]).cos());
        assert!(matches!(
            solve_ma(&bg, &dens, &SolverConfig::default()),
            Err(Error::Domain(_))
        ));
        let bad_bg = FormField::constant(g.clone(), &HermitianForm::diag(&[-1.0])).unwrap();
        let ones = PotentialField::from_fn(g, |_| 1.0);
        assert!(matches!(
            solve_ma(&bad_bg, &ones, &SolverConfig::default()),
            Err(Error::Domain(_))
        ));
        let cfg = SolverConfig {
            max_newton_iters: 0,
            ..SolverConfig::default()
        };
        assert!(matches!(solve_ma(&bg, &ones, &cfg), Err(Error::Usage(_))));
    }

    #[test]
    fn residual_reports_nonpositive_node() {
        let g = grid(1, 8);
        let bg = FormField::constant(g.clone(), &HermitianForm::identity(1)).unwrap();
        // u'' = -4π² · 0.1 cos(2πx); ∂∂̄u = -π²·0.1·... with amplitude 1 makes 1 + ∂∂̄u negative.
        let u = PotentialField::from_fn(g.clone(), |c| (2.0 * PI * c[0]).cos());
        let dens = PotentialField::from_fn(g, |_| 1.0);
        let r = ma_residual(&bg, &u, &dens, 1.0).unwrap();
        assert!(!r.positive && r.max.is_infinite());
    }
}
