//! `--check`: invariant suite on the configured model. Writes nothing.

use std::path::Path;

use nalgebra::DMatrix;
use num_complex::Complex64;

use emerge_core::gravonon;
use emerge_core::models::{build_chooser, build_generic_ci, build_telegraph, telegraph_terms};
use emerge_core::propagator::{self, SpectralDecomposition, StateVector};
use emerge_core::telegraph;
use emerge_core::HamiltonianMatrix;

use crate::config::{Config, Scenario, SweepModel};
use crate::error::CliError;
use crate::scenario::{self, section};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub pass: bool,
    pub detail: String,
}

fn result(name: &'static str, value: f64, bound: f64) -> CheckResult {
    CheckResult { name, pass: value <= bound, detail: format!("{value:.3e} (bound {bound:.0e})") }
}

fn spectral_checks(h: &HamiltonianMatrix, d: &SpectralDecomposition, psi0: &StateVector, times: &[f64]) -> Result<Vec<CheckResult>, CliError> {
    let n = h.dim();
    let scale = h.entries().norm().max(f64::MIN_POSITIVE);
    let mut resid = 0.0f64;
    for k in 0..n {
        let v = d.eigenvectors.column(k);
        let r = h.entries() * v - v * Complex64::new(d.eigenvalues[k], 0.0);
        resid = resid.max(r.norm() / scale);
    }
    let gram = d.eigenvectors.adjoint() * &d.eigenvectors;
    let ortho = (gram - DMatrix::<Complex64>::identity(n, n)).camax();
    let states = propagator::evolve(d, psi0, times)?;
    let norm = states.iter().map(|s| (s.norm_squared() - 1.0).abs()).fold(0.0, f64::max);
    let e0 = propagator::energy(h, psi0);
    // relative to the spectral radius when the energy itself is near zero
    let radius = d.eigenvalues.iter().fold(0.0f64, |m, l| m.max(l.abs()));
    let denom = e0.abs().max(radius).max(f64::MIN_POSITIVE);
    let energy = states.iter().map(|s| (propagator::energy(h, s) - e0).abs() / denom).fold(0.0, f64::max);
    let hermitian = h.check_hermitian().is_ok();
    Ok(vec![
        CheckResult { name: "hermitian", pass: hermitian, detail: format!("{hermitian}") },
        result("eigen residual / |H|", resid, 1e-10),
        result("eigenvector orthonormality", ortho, 1e-12),
        result("norm conservation", norm, 1e-10),
        result("energy conservation (relative)", energy, 1e-9),
    ])
}

pub fn run_checks(config: &Config, base: &Path) -> Result<Vec<CheckResult>, CliError> {
    match config.scenario {
        Scenario::Chooser => chooser_checks(config),
        Scenario::Telegraph => telegraph_checks(config),
        Scenario::Sweep => match section(&config.sweep)?.model {
            SweepModel::Chooser => {
                scenario::check_sweep(section(&config.sweep)?)?;
                chooser_checks(config)
            }
            SweepModel::Telegraph => {
                scenario::check_sweep(section(&config.sweep)?)?;
                telegraph_checks(config)
            }
        },
        Scenario::GravononModes => gravonon_checks(config),
        Scenario::Meanfield => meanfield_checks(config, base),
        Scenario::Dimensional => dimensional_checks(config),
    }
}

fn chooser_checks(config: &Config) -> Result<Vec<CheckResult>, CliError> {
    let p = scenario::chooser_params(section(&config.chooser)?)?;
    let gamma = scenario::chooser_gamma(&p)?;
    let times = scenario::time_grid(config.sampling, (gamma > 0.0).then(|| 5.0 / gamma), 257)?;
    let h = build_chooser(&p)?;
    let d = propagator::diagonalize(&h)?;
    let psi0 = scenario::chooser_initial(&p, h.dim())?;
    let mut out = spectral_checks(&h, &d, &psi0, &times)?;
    // the initial state is annihilated by the three-state block
    let mut block = h.entries().clone();
    for i in 3..h.dim() {
        block[(2, i)] = Complex64::new(0.0, 0.0);
        block[(i, 2)] = Complex64::new(0.0, 0.0);
    }
    block[(2, 2)] = Complex64::new(0.0, 0.0);
    out.push(result("zero state annihilated", (block * &psi0).camax(), 1e-14));
    Ok(out)
}

fn telegraph_checks(config: &Config) -> Result<Vec<CheckResult>, CliError> {
    let c = section(&config.telegraph)?;
    let p = scenario::telegraph_params(c)?;
    let layout = p.layout();
    let space = layout.default_space()?;
    let h = build_telegraph(&p, &space)?;
    let generic = build_generic_ci(&space, &telegraph_terms(&p))?;
    let d = propagator::diagonalize(&h)?;
    let basis = emerge_core::fock::Basis::new(space)?;
    let site = c.initial_site.clamp(1, 2) - 1;
    let start = basis
        .index_of(&telegraph::initial_config(&layout, site))
        .ok_or_else(|| CliError::Check("initial configuration outside the basis".into()))?;
    let mut psi0 = StateVector::from_element(h.dim(), Complex64::new(0.0, 0.0));
    psi0[start] = Complex64::new(1.0, 0.0);
    let times = scenario::telegraph_times(&p, if config.scenario == Scenario::Telegraph { config.sampling } else { None })?;
    let mut out = spectral_checks(&h, &d, &psi0, &times)?;
    out.push(result("builder vs generic terms", (h.entries() - generic.entries()).camax(), 1e-14));
    Ok(out)
}

fn gravonon_checks(config: &Config) -> Result<Vec<CheckResult>, CliError> {
    let b = scenario::site_basis(section(&config.gravonon)?)?;
    let omega = gravonon::build_omega(&b)?;
    let scale = omega.amax().max(f64::MIN_POSITIVE);
    let asym = (&omega - omega.transpose()).amax() / scale;
    let spec = gravonon::diagonalize_modes(&omega)?;
    let n = b.n_sites();
    let ortho = (spec.transform.transpose() * &spec.transform - DMatrix::<f64>::identity(n, n)).amax();
    let rebuilt = &spec.transform * DMatrix::from_diagonal(&nalgebra::DVector::from_vec(spec.frequencies.clone())) * spec.transform.transpose();
    let recon = (rebuilt - &omega).amax() / scale;
    Ok(vec![
        result("omega symmetry", asym, 1e-12),
        result("mode orthonormality", ortho, 1e-12),
        result("spectral reconstruction", recon, 1e-10),
    ])
}

fn meanfield_checks(config: &Config, base: &Path) -> Result<Vec<CheckResult>, CliError> {
    let c = section(&config.meanfield)?;
    let mut state = scenario::meanfield_state(c, base)?;
    let bound = state.max_stable_dt();
    let stable = CheckResult {
        name: "dt within stability bound",
        pass: c.dt > 0.0 && c.dt <= bound,
        detail: format!("dt {:.3e}, bound {bound:.3e}", c.dt),
    };
    if !stable.pass {
        return Ok(vec![stable]);
    }
    let ts = state.run(c.dt, c.steps, c.sample_every.max(1))?;
    let per_thousand = 1000.0 / c.steps.max(1) as f64;
    let drift = |name: &str| {
        let v = ts.channel(name).expect("norm channel");
        v.iter().map(|x| (x - v[0]).abs()).fold(0.0, f64::max) * per_thousand.max(1.0)
    };
    Ok(vec![
        stable,
        result("psi norm drift per 1000 steps", drift("norm_psi"), 1e-6),
        result("zeta norm drift per 1000 steps", drift("norm_zeta"), 1e-6),
    ])
}

fn dimensional_checks(config: &Config) -> Result<Vec<CheckResult>, CliError> {
    use emerge_core::dimensional;
    let c = config.dimensional.clone().unwrap_or_else(scenario::default_dimensional);
    let mut worst = 0.0f64;
    for &a in &c.radii {
        let g11 = dimensional::g11_from_compactification(c.g, a)?;
        let r = 2.0 * a;
        let v4 = dimensional::v_grav_4d(c.g, 1.0, r)?;
        let v11 = dimensional::v_grav_11d(g11, 1.0, r)?;
        worst = worst.max(((v4 - v11) / v4).abs());
    }
    Ok(vec![result("4D and 11D potentials agree at r = 2a", worst, 1e-12)])
}
