use nalgebra::DMatrix;
use num_complex::Complex64;
use proptest::prelude::*;

use emerge_core::meanfield::{Grid, GridState, MeanFieldParams};
use emerge_core::propagator::{self, StateVector};
use emerge_core::HamiltonianMatrix;

fn zeros(n: usize) -> Vec<Complex64> {
    vec![Complex64::new(0.0, 0.0); n]
}

/// Free lattice Hamiltonian with the solver's three-point Laplacian and
/// zero boundary values.
fn lattice_hamiltonian(grid: &Grid, m: f64) -> HamiltonianMatrix {
    let n = grid.n_points;
    let h = grid.spacing();
    let off = -1.0 / (2.0 * m * h * h);
    let entries = DMatrix::from_fn(n, n, |i, j| match i.abs_diff(j) {
        0 => Complex64::new(-2.0 * off, 0.0),
        1 => Complex64::new(off, 0.0),
        _ => Complex64::new(0.0, 0.0),
    });
    HamiltonianMatrix::new(entries, (0..n).map(|j| format!("x{j}")).collect()).unwrap()
}

fn solver_error(grid: Grid, t_end: f64, steps: usize) -> f64 {
    let psi0 = grid.gaussian(0.0, 1.0, 1.0);
    let mut s = GridState::new(grid, MeanFieldParams::default(), psi0.clone(), zeros(grid.n_points)).unwrap();
    let dt = t_end / steps as f64;
    for _ in 0..steps {
        s.step(dt).unwrap();
    }
    let root_h = grid.spacing().sqrt();
    let raw = StateVector::from_iterator(psi0.len(), psi0.iter().map(|z| z * root_h));
    let norm = raw.norm();
    let start = raw / Complex64::new(norm, 0.0);
    let d = propagator::diagonalize(&lattice_hamiltonian(&grid, 1.0)).unwrap();
    let exact = propagator::evolve(&d, &start, &[t_end]).unwrap().remove(0);
    s.psi()
        .iter()
        .zip(exact.iter())
        .map(|(a, b)| (a * root_h / norm - b).norm())
        .fold(0.0, f64::max)
}

#[test]
fn free_evolution_converges_to_exact_lattice_propagation() {
    let grid = Grid::new(-15.0, 15.0, 151).unwrap();
    let t_end = 1.0;
    let coarse = solver_error(grid, t_end, 40);
    let fine = solver_error(grid, t_end, 80);
    let ratio = coarse / fine;
    assert!(fine < 2e-3, "error {fine:e}");
    assert!((3.5..4.5).contains(&ratio), "convergence ratio {ratio}");
}

#[test]
fn packet_with_momentum_drifts() {
    let grid = Grid::new(-30.0, 30.0, 601).unwrap();
    let mut s = GridState::new(grid, MeanFieldParams::default(), grid.gaussian(-5.0, 1.5, 1.0), zeros(601)).unwrap();
    let ts = s.run(0.01, 400, 400).unwrap();
    let x = ts.channel("x_psi").unwrap();
    assert!((x[1] - x[0] - 4.0).abs() < 0.05, "moved {}", x[1] - x[0]);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn coupled_norms_conserved(
        g in 0.0f64..2.0,
        m_g in 0.5f64..3.0,
        v_o in -1.0f64..1.0,
        x0 in -3.0f64..3.0,
        k0 in -1.0f64..1.0,
    ) {
        let grid = Grid::new(-20.0, 20.0, 201).unwrap();
        let params = MeanFieldParams { g_newton: g, m_g, v_o, ..Default::default() };
        let mut s = GridState::new(grid, params, grid.gaussian(x0, 1.0, k0), grid.gaussian(0.0, 1.5, 0.0)).unwrap();
        let (n0, z0) = (s.norm_psi(), s.norm_zeta());
        let dt = s.max_stable_dt();
        for _ in 0..200 {
            s.step(dt).unwrap();
        }
        prop_assert!((s.norm_psi() - n0).abs() < 1e-10);
        prop_assert!((s.norm_zeta() - z0).abs() < 1e-10);
    }
}
