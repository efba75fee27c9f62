use std::f64::consts::PI;

use bigness_core::hermitian::{random_positive_definite, seeded_rng, HermitianForm};
use bigness_core::monge_ampere::{ma_residual, solve_ma, SolverConfig};
use bigness_core::torus::{
    i_ddbar, integrate_top, io, Factor, FormField, PotentialField, TorusGrid,
};
use num_complex::Complex;

type H = HermitianForm<f64>;

#[test]
fn i_ddbar_matches_real_second_derivatives() {
    // u = cos θ, θ = 2π k·x: ∂²u/∂a∂b = −4π² k_a k_b cos θ and
    // ∂_j∂̄_k = ¼(∂_{x_j} − i∂_{y_j})(∂_{x_k} + i∂_{y_k}).
    let grid = TorusGrid::<f64>::new(2, 8).unwrap();
    let k = [1i32, -2, 0, 3];
    let theta = |x: &[f64]| 2.0 * PI * k.iter().zip(x).map(|(a, b)| *a as f64 * b).sum::<f64>();
    let u = PotentialField::from_fn(grid.clone(), |x| theta(x).cos());
    let h = i_ddbar(&u);
    let mut err: f64 = 0.0;
    for node in 0..grid.nodes() {
        let c = theta(&grid.coords(node)).cos();
        for j in 0..2 {
            for l in 0..2 {
                let (xj, yj) = (k[2 * j] as f64, k[2 * j + 1] as f64);
                let (xl, yl) = (k[2 * l] as f64, k[2 * l + 1] as f64);
                let expect = Complex::new(xj, -yj) * Complex::new(xl, yl) * (-PI * PI * c);
                err = err.max((h.node_entries(node)[j * 2 + l] - expect).norm());
            }
        }
    }
    assert!(err < 1e-10, "{err}");
}

#[test]
fn top_degree_integrals_are_ddbar_exact() {
    let grid = TorusGrid::<f64>::new(2, 8).unwrap();
    let mut rng = seeded_rng(21);
    let alpha: H = random_positive_definite(2, &mut rng);
    let omega: H = random_positive_definite(2, &mut rng);
    let u = bigness_core::estimate::random_log_factor(&grid, 0.05, &mut rng);
    let tilde = FormField::constant(grid.clone(), &alpha)
        .unwrap()
        .add(&i_ddbar(&u))
        .unwrap();
    let a = integrate_top(&[Factor::from(&tilde), Factor::from(&tilde)]).unwrap();
    let b = integrate_top(&[Factor::from(&alpha), Factor::from(&alpha)]).unwrap();
    assert!((a - b).abs() <= 1e-8 * b.abs());
    let ddbar = i_ddbar(&u);
    let pairing = integrate_top(&[Factor::from(&ddbar), Factor::from(&omega)]).unwrap();
    assert!(pairing.abs() < 1e-10);
}

#[test]
fn n1_closed_form_solution() {
    let grid = TorusGrid::<f64>::new(1, 64).unwrap();
    let bg = FormField::constant(grid.clone(), &H::identity(1)).unwrap();
    let density = PotentialField::from_fn(grid.clone(), |x| 1.0 + 0.5 * (2.0 * PI * x[0]).cos());
    let r = solve_ma(&bg, &density, &SolverConfig::default()).unwrap();
    assert!((r.constant_c - 1.0).abs() < 1e-12);
    let err = (0..grid.nodes())
        .map(|i| {
            let x = grid.coords(i)[0];
            (r.u.values()[i] + ((2.0 * PI * x).cos() + 1.0) / (2.0 * PI * PI)).abs()
        })
        .fold(0.0, f64::max);
    assert!(err < 1e-9, "{err}");
    assert!(r.residual <= 1e-9);
}

#[test]
fn refinement_agrees_on_shared_nodes() {
    // Non-polynomial density; the coarse and fine solutions agree where nodes coincide.
    let solve_at = |res: usize| {
        let grid = TorusGrid::<f64>::new(1, res).unwrap();
        let bg = FormField::constant(grid.clone(), &H::identity(1)).unwrap();
        let d = PotentialField::from_fn(grid.clone(), |x| {
            (0.3 * (2.0 * PI * x[0]).cos() + 0.2 * (2.0 * PI * x[1]).sin()).exp()
        });
        (
            grid.clone(),
            solve_ma(&bg, &d, &SolverConfig::default()).unwrap(),
        )
    };
    let (coarse_grid, coarse) = solve_at(32);
    let (fine_grid, fine) = solve_at(64);
    let mut err: f64 = 0.0;
    for i in 0..coarse_grid.nodes() {
        let x = coarse_grid.coords(i);
        let j = fine_grid.nodes();
        let fi = (0..j).find(|&m| fine_grid.coords(m) == x).unwrap();
        err = err.max((coarse.u.values()[i] - fine.u.values()[fi]).abs());
    }
    assert!(err < 1e-10, "{err}");
}

#[test]
fn n2_perturbed_density_and_independent_checks() {
    let grid = TorusGrid::<f64>::new(2, 16).unwrap();
    let mut rng = seeded_rng(5);
    let alpha: H = random_positive_definite(2, &mut rng);
    let g = bigness_core::estimate::random_log_factor(&grid, 0.1, &mut rng);
    let density =
        PotentialField::new(grid.clone(), g.values().iter().map(|v| v.exp()).collect()).unwrap();
    let bg = FormField::constant(grid.clone(), &alpha).unwrap();
    let r = solve_ma(&bg, &density, &SolverConfig::default()).unwrap();
    assert!(r.newton_iters <= 20 && r.residual <= 1e-9 && r.positivity_margin > 0.0);
    assert!(r.u.max().abs() <= 1e-12);

    // Round trip through the binary cache leaves the residual unchanged.
    let mut bytes = Vec::new();
    io::write_potential(&mut bytes, &r.u).unwrap();
    let back = io::read_potential(&mut bytes.as_slice(), Some(grid.clone())).unwrap();
    let again = ma_residual(&bg, &back, &density, r.constant_c).unwrap();
    assert_eq!(again.max, r.residual);

    // A perturbed potential is measurably worse.
    let bump = PotentialField::from_fn(grid.clone(), |x| 1e-3 * (2.0 * PI * x[0]).cos());
    let worse = r.u.combine(1.0, &bump, 1.0).unwrap();
    assert!(
        ma_residual(&bg, &worse, &density, r.constant_c)
            .unwrap()
            .max
            > 1e-4
    );
}
