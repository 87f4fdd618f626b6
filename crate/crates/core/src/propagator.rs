//! Exact time evolution through the spectral decomposition of a Hermitian matrix.
//!
//! `Ψ(t) = Σ_k e^{-iλ_k t} v_k ⟨v_k|Ψ(0)⟩`, evaluated independently at each
//! requested time so results never depend on the sampling grid or on the
//! number of worker threads.

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::models::HamiltonianMatrix;
use crate::series::TimeSeries;

pub type StateVector = DVector<Complex64>;

/// Tolerance on the norm of an initial state.
pub const NORM_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone)]
pub struct SpectralDecomposition {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Orthonormal eigenvectors as columns, in eigenvalue order.
    pub eigenvectors: DMatrix<Complex64>,
}

impl SpectralDecomposition {
    pub fn dim(&self) -> usize {
        self.eigenvalues.len()
    }

    /// Expansion coefficients `⟨v_k|ψ⟩`.
    pub fn coefficients(&self, psi: &StateVector) -> Result<StateVector> {
        if psi.len() != self.dim() {
            return Err(Error::Dimension(format!(
                "state of length {} for a {}-dimensional decomposition",
                psi.len(),
                self.dim()
            )));
        }
        Ok(self.eigenvectors.ad_mul(psi))
    }

    /// `Σ_k λ_k v_k v_k†`.
    pub fn reconstruct(&self) -> DMatrix<Complex64> {
        let n = self.dim();
        let mut scaled = self.eigenvectors.clone();
        for (k, &lambda) in self.eigenvalues.iter().enumerate() {
            scaled.column_mut(k).scale_mut(lambda);
        }
        let out = &scaled * self.eigenvectors.adjoint();
        debug_assert_eq!(out.nrows(), n);
        out
    }
}

/// Eigen-decomposes a Hermitian matrix. Purely real input takes the real
/// symmetric path.
pub fn diagonalize(h: &HamiltonianMatrix) -> Result<SpectralDecomposition> {
    let m = h.entries();
    h.check_hermitian()?;
    let n = m.nrows();
    if n == 0 {
        return Ok(SpectralDecomposition {
            eigenvalues: Vec::new(),
            eigenvectors: DMatrix::zeros(0, 0),
        });
    }

    let (values, vectors): (Vec<f64>, DMatrix<Complex64>) = if m.iter().all(|z| z.im == 0.0) {
        let real = m.map(|z| z.re);
        let eig = SymmetricEigen::new(real);
        (
            eig.eigenvalues.iter().copied().collect(),
            eig.eigenvectors.map(|x| Complex64::new(x, 0.0)),
        )
    } else {
        let eig = SymmetricEigen::new(m.clone());
        (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
    };

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]).then(a.cmp(&b)));
    let eigenvalues = order.iter().map(|&k| values[k]).collect();
    let eigenvectors = DMatrix::from_fn(n, n, |i, j| vectors[(i, order[j])]);
    Ok(SpectralDecomposition { eigenvalues, eigenvectors })
}

fn check_normalized(psi0: &StateVector) -> Result<()> {
    let norm = psi0.norm();
    if (norm - 1.0).abs() > NORM_TOLERANCE {
        return Err(Error::contract(
            "normalized initial state",
            format!("|psi0| = {norm:.15}"),
        ));
    }
    Ok(())
}

fn state_at(d: &SpectralDecomposition, coeffs: &StateVector, t: f64) -> StateVector {
    let phased = StateVector::from_iterator(
        d.dim(),
        d.eigenvalues
            .iter()
            .zip(coeffs.iter())
            .map(|(&lambda, &c)| c * Complex64::from_polar(1.0, -lambda * t)),
    );
    &d.eigenvectors * phased
}

/// Evolves `psi0` to every time in `times`.
pub fn evolve(d: &SpectralDecomposition, psi0: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
    check_normalized(psi0)?;
    let coeffs = d.coefficients(psi0)?;
    Ok(times.par_iter().map(|&t| state_at(d, &coeffs, t)).collect())
}

/// `⟨target|Ψ(t)⟩`.
pub fn amplitude(d: &SpectralDecomposition, psi0: &StateVector, target: usize, t: f64) -> Result<Complex64> {
    if target >= d.dim() {
        return Err(Error::param("target_index", format!("{target} out of range 0..{}", d.dim())));
    }
    check_normalized(psi0)?;
    let coeffs = d.coefficients(psi0)?;
    Ok(d.eigenvalues
        .iter()
        .zip(coeffs.iter())
        .enumerate()
        .map(|(k, (&lambda, &c))| d.eigenvectors[(target, k)] * c * Complex64::from_polar(1.0, -lambda * t))
        .sum())
}

/// A named set of basis indices whose squared amplitudes are summed.
#[derive(Debug, Clone, PartialEq)]
pub struct Group {
    pub name: String,
    pub indices: Vec<usize>,
}

impl Group {
    pub fn new(name: impl Into<String>, indices: Vec<usize>) -> Self {
        Group { name: name.into(), indices }
    }
}

#[derive(Debug, Clone)]
pub struct GroupWeights {
    pub series: TimeSeries,
    /// Pairs of group positions that share at least one index.
    pub overlaps: Vec<(usize, usize)>,
}

/// `channel[g](t) = Σ_{i∈g} |Ψ_i(t)|²` for each group.
pub fn occupation_weights(times: &[f64], states: &[StateVector], groups: &[Group]) -> Result<GroupWeights> {
    if times.len() != states.len() {
        return Err(Error::Dimension(format!("{} times for {} states", times.len(), states.len())));
    }
    let dim = states.first().map_or(0, |s| s.len());
    if states.iter().any(|s| s.len() != dim) {
        return Err(Error::Dimension("states of unequal length".into()));
    }
    for g in groups {
        if let Some(&bad) = g.indices.iter().find(|&&i| i >= dim && !states.is_empty()) {
            return Err(Error::param("groups", format!("group `{}` index {bad} out of range 0..{dim}", g.name)));
        }
    }

    let mut overlaps = Vec::new();
    for a in 0..groups.len() {
        for b in a + 1..groups.len() {
            if groups[a].indices.iter().any(|i| groups[b].indices.contains(i)) {
                overlaps.push((a, b));
            }
        }
    }

    let mut series = TimeSeries::new(times.to_vec());
    for g in groups {
        let values = states
            .iter()
            .map(|s| g.indices.iter().map(|&i| s[i].norm_sqr()).sum())
            .collect();
        series.push_channel(g.name.clone(), values)?;
    }
    Ok(GroupWeights { series, overlaps })
}

/// `⟨ψ|H|ψ⟩` (real part; the imaginary part vanishes for Hermitian `H`).
pub fn energy(h: &HamiltonianMatrix, psi: &StateVector) -> f64 {
    psi.dotc(&(h.entries() * psi)).re
}

/// Linear time grid with `n` points on `[t0, t1]`.
pub fn linear_grid(t0: f64, t1: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![t0],
        _ => (0..n).map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(rows: &[&[f64]]) -> HamiltonianMatrix {
        let n = rows.len();
        let m = DMatrix::from_fn(n, n, |i, j| Complex64::new(rows[i][j], 0.0));
        HamiltonianMatrix::new(m, (0..n).map(|i| i.to_string()).collect()).unwrap()
    }

    fn basis_state(n: usize, i: usize) -> StateVector {
        let mut v = StateVector::zeros(n);
        v[i] = Complex64::new(1.0, 0.0);
        v
    }

    #[test]
    fn diagonal_input() {
        let h = matrix(&[&[2.0, 0.0, 0.0], &[0.0, -1.0, 0.0], &[0.0, 0.0, 0.5]]);
        let d = diagonalize(&h).unwrap();
        assert_eq!(d.eigenvalues, vec![-1.0, 0.5, 2.0]);
        for (k, row) in [1usize, 2, 0].iter().enumerate() {
            assert!((d.eigenvectors[(*row, k)].norm() - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn non_hermitian_rejected() {
        let m = DMatrix::from_row_slice(2, 2, &[
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            Complex64::new(2.0, 0.0),
            Complex64::new(0.0, 0.0),
        ]);
        assert!(HamiltonianMatrix::new(m, vec!["a".into(), "b".into()]).is_err());
    }

    #[test]
    fn zero_time_returns_initial_state() {
        let h = matrix(&[&[0.0, 0.3], &[0.3, 1.0]]);
        let d = diagonalize(&h).unwrap();
        let psi0 = basis_state(2, 0);
        let out = evolve(&d, &psi0, &[0.0]).unwrap();
        assert!((&out[0] - &psi0).norm() < 1e-14);
    }

    #[test]
    fn zero_hamiltonian_is_static() {
        let h = matrix(&[&[0.0, 0.0], &[0.0, 0.0]]);
        let d = diagonalize(&h).unwrap();
        let psi0 = StateVector::from_vec(vec![Complex64::new(0.6, 0.0), Complex64::new(0.0, 0.8)]);
        for s in evolve(&d, &psi0, &[0.0, 1.0, 10.0]).unwrap() {
            assert!((&s - &psi0).norm() < 1e-15);
        }
    }

    #[test]
    fn rabi_two_level() {
        let v = 0.7;
        let h = matrix(&[&[0.0, v], &[v, 0.0]]);
        let d = diagonalize(&h).unwrap();
        let psi0 = basis_state(2, 0);
        let times = linear_grid(0.0, 10.0, 51);
        let states = evolve(&d, &psi0, &times).unwrap();
        for (t, s) in times.iter().zip(&states) {
            assert!((s[1].norm_sqr() - (v * t).sin().powi(2)).abs() < 1e-12);
        }
    }

    #[test]
    fn unnormalized_initial_state_rejected() {
        let d = diagonalize(&matrix(&[&[1.0]])).unwrap();
        let psi0 = StateVector::from_element(1, Complex64::new(1.1, 0.0));
        assert!(matches!(evolve(&d, &psi0, &[0.0]), Err(Error::Contract { .. })));
    }

    #[test]
    fn amplitude_bounds_and_completeness() {
        let h = matrix(&[&[0.0, 0.2, 0.0], &[0.2, 0.1, 0.4], &[0.0, 0.4, -0.3]]);
        let d = diagonalize(&h).unwrap();
        let psi0 = basis_state(3, 0);
        assert!((amplitude(&d, &psi0, 0, 0.0).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-14);
        assert!(amplitude(&d, &psi0, 3, 0.0).is_err());
        let total: f64 = (0..3).map(|i| amplitude(&d, &psi0, i, 2.5).unwrap().norm_sqr()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn group_weights_flag_overlaps() {
        let psi = StateVector::from_vec(vec![
            Complex64::new(0.6, 0.0),
            Complex64::new(0.0, 0.8),
            Complex64::new(0.0, 0.0),
        ]);
        let groups = [
            Group::new("all", vec![0, 1, 2]),
            Group::new("first", vec![0]),
        ];
        let w = occupation_weights(&[0.0], &[psi.clone()], &groups).unwrap();
        assert!((w.series.channel("all").unwrap()[0] - 1.0).abs() < 1e-15);
        assert!((w.series.channel("first").unwrap()[0] - 0.36).abs() < 1e-15);
        assert_eq!(w.overlaps, vec![(0, 1)]);
        assert!(occupation_weights(&[0.0], &[psi], &[Group::new("bad", vec![7])]).is_err());
    }
}
