//! Gravonon modes induced by a chain of atomic cores in one dimension.
//!
//! Each core carries a normalised Gaussian envelope
//! `g_i(x) = (πσ²)^{-1/4} exp(−(x−x_i)²/(2σ²))`, so that all matrix elements
//! have closed forms.

use std::f64::consts::PI;

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct SiteBasis {
    pub positions: Vec<f64>,
    pub sigma: f64,
    pub vgrav: Vec<f64>,
    pub theta: f64,
    pub m_g: f64,
    pub v_o: f64,
}

impl SiteBasis {
    pub fn validate(&self) -> Result<()> {
        if !(self.sigma > 0.0) {
            return Err(Error::param("sigma", format!("must be positive, got {}", self.sigma)));
        }
        if !(self.m_g > 0.0) {
            return Err(Error::param("m_g", format!("must be positive, got {}", self.m_g)));
        }
        if self.positions.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::param("positions", "must be strictly increasing"));
        }
        if self.vgrav.len() != self.positions.len() {
            return Err(Error::Dimension(format!(
                "{} V_grav values for {} sites",
                self.vgrav.len(),
                self.positions.len()
            )));
        }
        let all = self.positions.iter().chain(&self.vgrav).chain([&self.theta, &self.v_o]);
        if all.into_iter().any(|x| !x.is_finite()) {
            return Err(Error::param("basis", "all values must be finite"));
        }
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.positions.len()
    }

    /// Normalised envelope of site `i` at `x`.
    pub fn envelope(&self, i: usize, x: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let d = x - self.positions[i];
        (PI * s2).powf(-0.25) * (-d * d / (2.0 * s2)).exp()
    }
}

/// Overlap `⟨g_i|g_j⟩` for centres a distance `d` apart.
pub fn overlap(d: f64, sigma: f64) -> f64 {
    (-d * d / (4.0 * sigma * sigma)).exp()
}

/// `⟨g_i|−∂²|g_j⟩` for centres a distance `d` apart.
pub fn laplacian_element(d: f64, sigma: f64) -> f64 {
    let s2 = sigma * sigma;
    (1.0 - d * d / (2.0 * s2)) / (2.0 * s2) * overlap(d, sigma)
}

/// `Ω_ij = θ² V_i V_j ⟨g_i|−∂²/(2m_g) + V_o|g_j⟩`.
pub fn build_omega(basis: &SiteBasis) -> Result<DMatrix<f64>> {
    basis.validate()?;
    let n = basis.n_sites();
    let mut omega = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let d = basis.positions[j] - basis.positions[i];
            let inner = laplacian_element(d, basis.sigma) / (2.0 * basis.m_g)
                + basis.v_o * overlap(d, basis.sigma);
            let v = basis.theta * basis.theta * basis.vgrav[i] * basis.vgrav[j] * inner;
            omega[(i, j)] = v;
            omega[(j, i)] = v;
        }
    }
    Ok(omega)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ModeSpectrum {
    /// Ascending mode energies Ω_k.
    pub frequencies: Vec<f64>,
    /// Column k holds the site amplitudes of mode k.
    pub transform: DMatrix<f64>,
}

/// Diagonalises a real symmetric Ω into independent oscillators.
pub fn diagonalize_modes(omega: &DMatrix<f64>) -> Result<ModeSpectrum> {
    if !omega.is_square() {
        return Err(Error::Dimension(format!("{}x{} matrix is not square", omega.nrows(), omega.ncols())));
    }
    let n = omega.nrows();
    let scale = omega.amax();
    for i in 0..n {
        for j in (i + 1)..n {
            if (omega[(i, j)] - omega[(j, i)]).abs() > 1e-12 * scale {
                return Err(Error::contract(
                    "symmetric",
                    format!("Ω[{i},{j}] = {} but Ω[{j},{i}] = {}", omega[(i, j)], omega[(j, i)]),
                ));
            }
        }
    }
    let eig = SymmetricEigen::new(omega.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let frequencies = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let transform = DMatrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, order[c])]);
    Ok(ModeSpectrum { frequencies, transform })
}

/// `√(ω_i/2)·g_i(x)·V_grav(x_i)·θ`.
pub fn coupling_function(x: f64, i: usize, basis: &SiteBasis, omega_i: f64) -> Result<f64> {
    if i >= basis.n_sites() {
        return Err(Error::param("i", format!("site {i} out of range for {} sites", basis.n_sites())));
    }
    if !(omega_i >= 0.0) {
        return Err(Error::param(
            "omega_i",
            format!("unstable mode with negative frequency {omega_i}"),
        ));
    }
    Ok((omega_i / 2.0).sqrt() * basis.envelope(i, x) * basis.vgrav[i] * basis.theta)
}

/// Field value `ζ⁺(x) + ζ(x) = Σ_i 2 q_i g(x − x_i)`.
pub fn field_value(x: f64, q: &[f64], basis: &SiteBasis, frequencies: &[f64]) -> Result<f64> {
    let n = basis.n_sites();
    if q.len() != n || frequencies.len() != n {
        return Err(Error::Dimension(format!(
            "{} displacements and {} frequencies for {n} sites",
            q.len(),
            frequencies.len()
        )));
    }
    let mut sum = 0.0;
    for i in 0..n {
        sum += 2.0 * q[i] * coupling_function(x, i, basis, frequencies[i])?;
    }
    Ok(sum)
}

/// `Σ_ij q_i q_j g(x−x_i) g(x−x_j)`, evaluated as a perfect square.
pub fn potential_term(x: f64, q: &[f64], basis: &SiteBasis, frequencies: &[f64]) -> Result<f64> {
    let half = field_value(x, q, basis, frequencies)? / 2.0;
    Ok(half * half)
}
