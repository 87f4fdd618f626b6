//! Coupled mean-field propagation of the matter field ψ and the gravonon
//! field ζ on a uniform 1D grid with Dirichlet walls.
//!
//! Both fields move under `−∂²/(2m) + V` with Crank–Nicolson. The potential
//! of each field depends on the other, so a step first predicts both
//! fields with the potentials at the start of the step and then redoes the
//! step with potentials built from the midpoint fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::series::TimeSeries;

/// Edge magnitude allowed relative to the field peak.
pub const EDGE_TOLERANCE: f64 = 1e-8;
pub const MIN_POINTS: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Grid {
    pub x_min: f64,
    pub x_max: f64,
    pub n_points: usize,
}

impl Grid {
    pub fn new(x_min: f64, x_max: f64, n_points: usize) -> Result<Self> {
        if n_points < MIN_POINTS {
            return Err(Error::param("n_points", format!("need at least {MIN_POINTS}, got {n_points}")));
        }
        if !(x_max > x_min) || !x_min.is_finite() || !x_max.is_finite() {
            return Err(Error::param("x_max", format!("need x_min < x_max, got [{x_min}, {x_max}]")));
        }
        Ok(Grid { x_min, x_max, n_points })
    }

    pub fn spacing(&self) -> f64 {
        (self.x_max - self.x_min) / (self.n_points - 1) as f64
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x_min + j as f64 * self.spacing()
    }

    pub fn points(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.x(j)).collect()
    }

    /// Normalised packet `∝ exp(−(x−x0)²/(4σ²) + i·k0·x)`; `σ` is the
    /// standard deviation of `|ψ|²`.
    pub fn gaussian(&self, x0: f64, sigma: f64, k0: f64) -> Vec<Complex64> {
        let raw: Vec<Complex64> = (0..self.n_points)
            .map(|j| {
                let x = self.x(j);
                let d = x - x0;
                Complex64::from_polar((-d * d / (4.0 * sigma * sigma)).exp(), k0 * x)
            })
            .collect();
        let n = norm(&raw, self.spacing()).sqrt();
        raw.into_iter().map(|z| z / n).collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeanFieldParams {
    pub m: f64,
    pub m_g: f64,
    /// `G^(D)·m·M_ext`.
    pub g_newton: f64,
    /// Exponent D of the `r^{2−D}` law.
    pub d_spatial: f64,
    pub source: f64,
    /// Softening length r₀; one grid spacing when `None`.
    pub softening: Option<f64>,
    pub v_o: f64,
    pub k: f64,
    pub c: f64,
    /// Static background h₀₀ on the grid; the `−(kc/2)h₀₀` term is off when `None`.
    pub h00: Option<Vec<f64>>,
}

impl Default for MeanFieldParams {
    fn default() -> Self {
        MeanFieldParams {
            m: 1.0,
            m_g: 1.0,
            g_newton: 0.0,
            d_spatial: 3.0,
            source: 0.0,
            softening: None,
            v_o: 0.0,
            k: 0.0,
            c: 137.036,
            h00: None,
        }
    }
}

impl MeanFieldParams {
    fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.m > 0.0) {
            return Err(Error::param("m", format!("must be positive, got {}", self.m)));
        }
        if !(self.m_g > 0.0) {
            return Err(Error::param("m_g", format!("must be positive, got {}", self.m_g)));
        }
        if let Some(r0) = self.softening {
            if !(r0 > 0.0) {
                return Err(Error::param("softening", format!("must be positive, got {r0}")));
            }
        }
        if let Some(h) = &self.h00 {
            if h.len() != grid.n_points {
                return Err(Error::Dimension(format!(
                    "h00 has {} samples, grid has {}",
                    h.len(),
                    grid.n_points
                )));
            }
        }
        let scalars = [self.g_newton, self.d_spatial, self.source, self.v_o, self.k, self.c];
        if scalars.iter().any(|x| !x.is_finite()) {
            return Err(Error::param("params", "all values must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridState {
    grid: Grid,
    params: MeanFieldParams,
    psi: Vec<Complex64>,
    zeta: Vec<Complex64>,
    time: f64,
    /// `G·m·M/r^{D−2}` on the grid, softened.
    newton: Vec<f64>,
}

fn norm(f: &[Complex64], h: f64) -> f64 {
    f.iter().map(|z| z.norm_sqr()).sum::<f64>() * h
}

fn check_edges(name: &'static str, f: &[Complex64]) -> Result<()> {
    let peak = f.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let edge = f[0].norm().max(f[f.len() - 1].norm());
    if peak > 0.0 && edge > EDGE_TOLERANCE * peak {
        return Err(Error::contract(
            "field negligible at grid edges",
            format!("{name} edge value {edge:e} vs peak {peak:e}"),
        ));
    }
    Ok(())
}

impl GridState {
    pub fn new(grid: Grid, params: MeanFieldParams, psi: Vec<Complex64>, zeta: Vec<Complex64>) -> Result<Self> {
        params.validate(&grid)?;
        for (name, f) in [("psi", &psi), ("zeta", &zeta)] {
            if f.len() != grid.n_points {
                return Err(Error::Dimension(format!(
                    "{name} has {} samples, grid has {}",
                    f.len(),
                    grid.n_points
                )));
            }
            if f.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
                return Err(Error::param(name, "field values must be finite"));
            }
        }
        check_edges("psi", &psi)?;
        check_edges("zeta", &zeta)?;
        let r0 = params.softening.unwrap_or(grid.spacing());
        let newton = (0..grid.n_points)
            .map(|j| {
                let r = grid.x(j) - params.source;
                params.g_newton * (r * r + r0 * r0).powf((2.0 - params.d_spatial) / 2.0)
            })
            .collect();
        Ok(GridState { grid, params, psi, zeta, time: 0.0, newton })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn params(&self) -> &MeanFieldParams {
        &self.params
    }

    pub fn psi(&self) -> &[Complex64] {
        &self.psi
    }

    pub fn zeta(&self) -> &[Complex64] {
        &self.zeta
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    /// Softened `G·m·M/r^{D−2}` (positive for an attractive source).
    pub fn newton_profile(&self) -> &[f64] {
        &self.newton
    }

    pub fn norm_psi(&self) -> f64 {
        norm(&self.psi, self.grid.spacing())
    }

    pub fn norm_zeta(&self) -> f64 {
        norm(&self.zeta, self.grid.spacing())
    }

    pub fn mean_x(&self) -> f64 {
        let (m0, m1, _) = self.moments();
        m1 / m0
    }

    /// Standard deviation of `|ψ|²`.
    pub fn width(&self) -> f64 {
        let (m0, m1, m2) = self.moments();
        let mean = m1 / m0;
        (m2 / m0 - mean * mean).max(0.0).sqrt()
    }

    fn moments(&self) -> (f64, f64, f64) {
        let mut m = (0.0, 0.0, 0.0);
        for (j, z) in self.psi.iter().enumerate() {
            let x = self.grid.x(j);
            let p = z.norm_sqr();
            m.0 += p;
            m.1 += p * x;
            m.2 += p * x * x;
        }
        m
    }

    /// `|⟨a|ψ⟩|` with the grid measure.
    pub fn overlap_psi(&self, a: &[Complex64]) -> f64 {
        let s: Complex64 = a.iter().zip(&self.psi).map(|(x, y)| x.conj() * y).sum();
        s.norm() * self.grid.spacing()
    }

    /// Largest dt accepted by [`GridState::step`]: `h²·min(m, m_g)`.
    pub fn max_stable_dt(&self) -> f64 {
        let h = self.grid.spacing();
        h * h * self.params.m.min(self.params.m_g)
    }

    /// Potentials `(V_ψ, V_ζ)` generated by the given fields.
    pub fn potentials(&self, psi: &[Complex64], zeta: &[Complex64]) -> (Vec<f64>, Vec<f64>) {
        let p = &self.params;
        let n = self.grid.n_points;
        let mut v_psi = Vec::with_capacity(n);
        let mut v_zeta = Vec::with_capacity(n);
        for j in 0..n {
            let u = self.newton[j];
            let z2 = zeta[j].norm_sqr();
            let p2 = psi[j].norm_sqr();
            v_psi.push(-u * (1.0 - 0.25 * z2) - 0.5 * p.m * z2);
            let mut vz = -0.5 * p.m * p2 + 0.25 * u * p2 + p.v_o;
            if let Some(h) = &p.h00 {
                vz -= 0.5 * p.k * p.c * h[j];
            }
            v_zeta.push(vz);
        }
        (v_psi, v_zeta)
    }

    /// One predictor–corrector step of the coupled equations.
    pub fn step(&mut self, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::param("dt", format!("must be positive, got {dt}")));
        }
        let bound = self.max_stable_dt();
        if dt > bound {
            return Err(Error::contract(
                "dt <= h^2 min(m, m_g)",
                format!("dt = {dt:e} exceeds {bound:e} for spacing {:e}", self.grid.spacing()),
            ));
        }
        let h = self.grid.spacing();
        let (vp, vz) = self.potentials(&self.psi, &self.zeta);
        let psi_pred = cn_step(&self.psi, &vp, self.params.m, h, dt);
        let zeta_pred = cn_step(&self.zeta, &vz, self.params.m_g, h, dt);
        let mid = |a: &[Complex64], b: &[Complex64]| -> Vec<Complex64> {
            a.iter().zip(b).map(|(x, y)| (x + y) * 0.5).collect()
        };
        let psi_mid = mid(&self.psi, &psi_pred);
        let zeta_mid = mid(&self.zeta, &zeta_pred);
        let (vp, vz) = self.potentials(&psi_mid, &zeta_mid);
        self.psi = cn_step(&self.psi, &vp, self.params.m, h, dt);
        self.zeta = cn_step(&self.zeta, &vz, self.params.m_g, h, dt);
        self.time += dt;
        Ok(())
    }

    /// Crank–Nicolson step under fixed potentials; `dt` may be negative.
    pub fn step_frozen(&mut self, dt: f64, v_psi: &[f64], v_zeta: &[f64]) -> Result<()> {
        let n = self.grid.n_points;
        if v_psi.len() != n || v_zeta.len() != n {
            return Err(Error::Dimension(format!("potentials must have {n} samples")));
        }
        let h = self.grid.spacing();
        self.psi = cn_step(&self.psi, v_psi, self.params.m, h, dt);
        self.zeta = cn_step(&self.zeta, v_zeta, self.params.m_g, h, dt);
        self.time += dt;
        Ok(())
    }

    /// Propagates `n_steps` steps, sampling every `sample_every` steps
    /// (and at the start).
    pub fn run(&mut self, dt: f64, n_steps: usize, sample_every: usize) -> Result<TimeSeries> {
        if sample_every == 0 {
            return Err(Error::param("sample_every", "must be at least 1"));
        }
        let initial = self.psi.clone();
        let mut times = Vec::new();
        let mut cols: [Vec<f64>; 5] = Default::default();
        let mut sample = |s: &GridState| {
            times.push(s.time);
            cols[0].push(s.norm_psi());
            cols[1].push(s.norm_zeta());
            cols[2].push(s.mean_x());
            cols[3].push(s.width());
            cols[4].push(s.overlap_psi(&initial));
        };
        sample(self);
        for i in 1..=n_steps {
            self.step(dt)?;
            if i % sample_every == 0 {
                sample(self);
            }
        }
        let mut ts = TimeSeries::new(times);
        let [a, b, c, d, e] = cols;
        for (name, v) in [("norm_psi", a), ("norm_zeta", b), ("x_psi", c), ("width_psi", d), ("overlap_psi", e)] {
            ts.push_channel(name, v)?;
        }
        Ok(ts)
    }
}

/// Solves `(1 + i·dt/2·H) f' = (1 − i·dt/2·H) f` for the tridiagonal
/// `H = −∂²/(2m) + V` with zero boundary values.
fn cn_step(f: &[Complex64], v: &[f64], mass: f64, h: f64, dt: f64) -> Vec<Complex64> {
    let n = f.len();
    let off = -1.0 / (2.0 * mass * h * h);
    let half = Complex64::new(0.0, dt / 2.0);
    let rhs: Vec<Complex64> = (0..n)
        .map(|j| {
            let mut hf = (-2.0 * off + v[j]) * f[j];
            if j > 0 {
                hf += off * f[j - 1];
            }
            if j + 1 < n {
                hf += off * f[j + 1];
            }
            f[j] - half * hf
        })
        .collect();
    let a = half * off;
    let diag: Vec<Complex64> = v.iter().map(|&vj| 1.0 + half * (-2.0 * off + vj)).collect();
    thomas(a, &diag, &rhs)
}

/// Tridiagonal solve with constant off-diagonals `a`.
fn thomas(a: Complex64, diag: &[Complex64], rhs: &[Complex64]) -> Vec<Complex64> {
    let n = diag.len();
    let mut c = vec![Complex64::new(0.0, 0.0); n];
    let mut d = vec![Complex64::new(0.0, 0.0); n];
    c[0] = a / diag[0];
    d[0] = rhs[0] / diag[0];
    for j in 1..n {
        let denom = diag[j] - a * c[j - 1];
        c[j] = a / denom;
        d[j] = (rhs[j] - a * d[j - 1]) / denom;
    }
    let mut x = d;
    for j in (0..n - 1).rev() {
        let next = x[j + 1];
        x[j] -= c[j] * next;
    }
    x
}
