//! Scenario runners. Each returns its output files as in-memory buffers so
//! nothing touches the disk unless the whole run succeeds.

use std::path::Path;

use num_complex::Complex64;
use rayon::prelude::*;

use emerge_core::analytic;
use emerge_core::dimensional;
use emerge_core::gravonon::{self, SiteBasis};
use emerge_core::meanfield::{Grid, GridState, MeanFieldParams};
use emerge_core::models::{build_chooser, chooser_index, BandLayout, ChooserParams, SiteParams, TelegraphParams};
use emerge_core::propagator::{self, Group, StateVector};
use emerge_core::series::fmt_sci;
use emerge_core::telegraph::{self, SwitchingStats};
use emerge_core::TimeSeries;

use crate::config::{
    resolve, BandConfig, ChooserConfig, Config, CsvField, DimensionalConfig, FieldConfig, GravononConfig, Layout,
    MeanfieldConfig, Preset, Sampling, Scenario, SweepConfig, SweepModel, TelegraphConfig,
};
use crate::error::CliError;

/// Default number of samples on the chooser time grid.
pub const CHOOSER_POINTS: usize = 2048;
/// Default number of samples on the telegraph time grid.
pub const TELEGRAPH_POINTS: usize = 600;
/// Telegraph runs span this many band recurrence times by default.
pub const TELEGRAPH_RECURRENCES: f64 = 4.0;

/// One output file, named `<prefix><suffix>`.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifact {
    pub suffix: &'static str,
    pub bytes: Vec<u8>,
}

/// `key = value` lines; floats in the CSV notation.
#[derive(Debug, Default)]
pub struct Report {
    lines: Vec<String>,
}

impl Report {
    pub fn num(&mut self, key: &str, value: f64) -> &mut Self {
        self.lines.push(format!("{key} = {}", fmt_sci(value)));
        self
    }

    pub fn int(&mut self, key: &str, value: usize) -> &mut Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }

    pub fn flag(&mut self, key: &str, value: bool) -> &mut Self {
        self.lines.push(format!("{key} = {value}"));
        self
    }

    pub fn artifact(&self) -> Artifact {
        let mut text = self.lines.join("\n");
        text.push('\n');
        Artifact { suffix: "_report.txt", bytes: text.into_bytes() }
    }
}

fn series_artifact(ts: &TimeSeries) -> Result<Artifact, CliError> {
    let mut bytes = Vec::new();
    ts.write_csv(&mut bytes)?;
    Ok(Artifact { suffix: ".csv", bytes })
}

fn table_artifact(header: &[String], rows: &[Vec<String>]) -> Result<Artifact, CliError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(r)?;
    }
    let bytes = w.into_inner().map_err(|e| CliError::Io(e.into_error()))?;
    Ok(Artifact { suffix: ".csv", bytes })
}

/// Runs the configured scenario. `base` is the directory relative paths in
/// the config are resolved against.
pub fn run(config: &Config, base: &Path) -> Result<Vec<Artifact>, CliError> {
    match config.scenario {
        Scenario::Chooser => chooser(section(&config.chooser)?, config.sampling),
        Scenario::Telegraph => telegraph_scenario(section(&config.telegraph)?, config.sampling),
        Scenario::GravononModes => gravonon_modes(section(&config.gravonon)?),
        Scenario::Meanfield => meanfield(section(&config.meanfield)?, base),
        Scenario::Dimensional => dimensional_scenario(&config.dimensional.clone().unwrap_or_else(default_dimensional)),
        Scenario::Sweep => sweep(config),
    }
}

pub fn section<T>(s: &Option<T>) -> Result<&T, CliError> {
    s.as_ref().ok_or_else(|| CliError::Config("missing scenario table".into()))
}

pub fn default_dimensional() -> DimensionalConfig {
    toml::from_str("").expect("every dimensional key has a default")
}

// ---------------------------------------------------------------------------
// chooser

pub fn chooser_params(c: &ChooserConfig) -> Result<ChooserParams, CliError> {
    let delta = c.delta.unwrap_or_else(|| analytic::self_consistent_delta(c.u));
    let layout = match c.layout {
        Layout::Interval => BandLayout::Interval,
        Layout::Symmetric => BandLayout::Symmetric,
    };
    let p = ChooserParams::new(c.v, c.w, c.n, delta, c.u).with_alpha(c.alpha).with_layout(layout);
    p.validate()?;
    Ok(p)
}

pub fn chooser_gamma(p: &ChooserParams) -> Result<f64, CliError> {
    Ok(analytic::gamma_from(p.u, p.delta)?)
}

/// Null state of the three-state block, padded with an empty band.
pub fn chooser_initial(p: &ChooserParams, dim: usize) -> Result<StateVector, CliError> {
    let (q, r, k) = analytic::null_state(p.v, p.w)?;
    let mut psi = StateVector::from_element(dim, Complex64::new(0.0, 0.0));
    psi[chooser_index::Q0] = q.into();
    psi[chooser_index::R0] = r.into();
    psi[chooser_index::K_PROJ] = k.into();
    Ok(psi)
}

pub fn time_grid(s: Option<Sampling>, default_end: Option<f64>, default_points: usize) -> Result<Vec<f64>, CliError> {
    let s = s.unwrap_or(Sampling { t_start: None, t_end: None, points: None });
    let t0 = s.t_start.unwrap_or(0.0);
    let t1 = match s.t_end.or(default_end) {
        Some(t) => t,
        None => return Err(CliError::Config("sampling.t_end is required for this model".into())),
    };
    let n = s.points.unwrap_or(default_points);
    if !(t0.is_finite() && t1.is_finite() && t1 > t0) {
        return Err(CliError::Config(format!("sampling window [{t0}, {t1}] is empty or not finite")));
    }
    if n < 2 {
        return Err(CliError::Config("sampling.points must be at least 2".into()));
    }
    Ok(propagator::linear_grid(t0, t1, n))
}

fn chooser(c: &ChooserConfig, sampling: Option<Sampling>) -> Result<Vec<Artifact>, CliError> {
    let p = chooser_params(c)?;
    let gamma = chooser_gamma(&p)?;
    let default_end = (gamma > 0.0).then(|| 5.0 / gamma);
    let times = time_grid(sampling, default_end, CHOOSER_POINTS)?;
    let h = build_chooser(&p)?;
    let d = propagator::diagonalize(&h)?;
    let psi0 = chooser_initial(&p, h.dim())?;
    let states = propagator::evolve(&d, &psi0, &times)?;
    let groups = [
        Group::new("w_Q0", vec![chooser_index::Q0]),
        Group::new("w_R0", vec![chooser_index::R0]),
        Group::new("w_Kproj", vec![chooser_index::K_PROJ]),
        Group::new("w_band", (chooser_index::BAND_START..h.dim()).collect()),
    ];
    let ts = propagator::occupation_weights(&times, &states, &groups)?.series;

    let band = ts.channel("w_band").expect("band channel");
    let mut report = Report::default();
    report.num("gamma", gamma);
    if p.u != 0.0 {
        report.num("plateau_target", 1.0 - (p.w / p.u).powi(2));
    }
    if gamma > 0.0 {
        let mut worst = 0.0f64;
        let mut compared = 0;
        let mut late = Vec::new();
        for (&t, &b) in times.iter().zip(band) {
            if t >= 1.0 / gamma {
                worst = worst.max((b - analytic::band_weight(t, p.u, p.w, gamma)?).abs());
                compared += 1;
            }
            if t >= 5.0 / gamma {
                late.push(b);
            }
        }
        report.num("max_abs_deviation", worst).int("points_compared", compared);
        if !late.is_empty() {
            report.num("plateau", late.iter().sum::<f64>() / late.len() as f64);
        }
    }
    let norm_err = states.iter().map(|s| (s.norm_squared() - 1.0).abs()).fold(0.0, f64::max);
    report.num("max_norm_error", norm_err);
    Ok(vec![series_artifact(&ts)?, report.artifact()])
}

// ---------------------------------------------------------------------------
// telegraph

pub fn telegraph_params(c: &TelegraphConfig) -> Result<TelegraphParams, CliError> {
    let mut p = match c.preset {
        Some(Preset::Reference) => telegraph::reference_params(),
        None => {
            if c.sites.len() != 2 {
                return Err(CliError::Config(format!(
                    "telegraph needs exactly two [[telegraph.sites]] tables without a preset, got {}",
                    c.sites.len()
                )));
            }
            let blank = SiteParams { e_g: 0.0, e_w: 0.0, v_loc: 0.0, eps_grav: 0.0, band: Vec::new(), v_gw: 0.0 };
            TelegraphParams { sites: [blank.clone(), blank], hop: 0.0 }
        }
    };
    match c.sites.len() {
        0 => {}
        2 => {
            for (slot, s) in p.sites.iter_mut().zip(&c.sites) {
                let band = match &s.band {
                    BandConfig::Levels(v) => v.clone(),
                    BandConfig::Flat(f) => telegraph::flat_band(f.center, f.width, f.levels),
                };
                *slot = SiteParams { e_g: s.e_g, e_w: s.e_w, v_loc: s.v_loc, eps_grav: s.eps_grav, band, v_gw: s.v_gw };
            }
        }
        n => return Err(CliError::Config(format!("telegraph.sites must list both sites, got {n}"))),
    }
    if let Some(h) = c.hop {
        p.hop = h;
    }
    p.validate()?;
    Ok(p)
}

fn telegraph_initial_site(c: &TelegraphConfig) -> Result<usize, CliError> {
    match c.initial_site {
        1 | 2 => Ok(c.initial_site - 1),
        s => Err(CliError::Config(format!("telegraph.initial_site must be 1 or 2, got {s}"))),
    }
}

pub fn telegraph_times(p: &TelegraphParams, sampling: Option<Sampling>) -> Result<Vec<f64>, CliError> {
    let default_end = telegraph::recurrence_time(p).map(|t| TELEGRAPH_RECURRENCES * t);
    time_grid(sampling, default_end, TELEGRAPH_POINTS)
}

fn telegraph_run(p: &TelegraphParams, site: usize, times: &[f64]) -> Result<telegraph::TelegraphRun, CliError> {
    let layout = p.layout();
    let space = layout.default_space()?;
    Ok(telegraph::simulate(p, &space, &telegraph::initial_config(&layout, site), times)?)
}

fn telegraph_scenario(c: &TelegraphConfig, sampling: Option<Sampling>) -> Result<Vec<Artifact>, CliError> {
    let p = telegraph_params(c)?;
    let site = telegraph_initial_site(c)?;
    let times = telegraph_times(&p, sampling)?;
    let run = telegraph_run(&p, site, &times)?;
    let s1 = run.series.channel("site1").expect("site1 channel");
    let s2 = run.series.channel("site2").expect("site2 channel");
    let stats = SwitchingStats::of(s1, s2);
    let mut report = Report::default();
    report.int("basis_size", run.basis_size).int("crossings", stats.crossings);
    for (k, ch) in stats.channels.iter().enumerate() {
        let n = k + 1;
        report
            .num(&format!("site{n}_low"), ch.low)
            .num(&format!("site{n}_high"), ch.high)
            .num(&format!("site{n}_near_fraction"), ch.near_fraction);
    }
    if let Some(t) = telegraph::recurrence_time(&p) {
        report.num("recurrence_time", t);
    }
    report.flag("telegraph", stats.is_telegraph(2, 0.8));
    Ok(vec![series_artifact(&run.series)?, report.artifact()])
}

// ---------------------------------------------------------------------------
// gravonon modes

pub fn site_basis(c: &GravononConfig) -> Result<SiteBasis, CliError> {
    let vgrav = match c.vgrav.len() {
        1 => vec![c.vgrav[0]; c.positions.len()],
        _ => c.vgrav.clone(),
    };
    let b = SiteBasis { positions: c.positions.clone(), sigma: c.sigma, vgrav, theta: c.theta, m_g: c.m_g, v_o: c.v_o };
    b.validate()?;
    Ok(b)
}

fn gravonon_modes(c: &GravononConfig) -> Result<Vec<Artifact>, CliError> {
    let b = site_basis(c)?;
    let spectrum = gravonon::diagonalize_modes(&gravonon::build_omega(&b)?)?;
    let n = b.n_sites();
    let mut header = vec!["mode".to_string(), "omega".to_string()];
    header.extend((1..=n).map(|i| format!("site{i}")));
    let rows: Vec<Vec<String>> = spectrum
        .frequencies
        .iter()
        .enumerate()
        .map(|(k, &f)| {
            let mut row = vec![k.to_string(), fmt_sci(f)];
            row.extend((0..n).map(|i| fmt_sci(spectrum.transform[(i, k)])));
            row
        })
        .collect();
    Ok(vec![table_artifact(&header, &rows)?])
}

// ---------------------------------------------------------------------------
// mean field

fn read_rows(path: &Path, width: usize) -> Result<Vec<Vec<f64>>, CliError> {
    let bad = |msg: String| CliError::Config(format!("{}: {msg}", path.display()));
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .from_path(path)
        .map_err(|e| bad(e.to_string()))?;
    let mut rows = Vec::new();
    for (line, rec) in reader.records().enumerate() {
        let rec = rec.map_err(|e| bad(e.to_string()))?;
        if rec.len() != width {
            return Err(bad(format!("row {} has {} columns, expected {width}", line + 1, rec.len())));
        }
        let row = rec
            .iter()
            .map(|s| s.parse::<f64>().map_err(|_| bad(format!("row {}: `{s}` is not a number", line + 1))))
            .collect::<Result<Vec<f64>, _>>()?;
        rows.push(row);
    }
    Ok(rows)
}

/// Rows must sit on the grid points, in order.
fn check_abscissae(path: &Path, rows: &[Vec<f64>], grid: &Grid) -> Result<(), CliError> {
    if rows.len() != grid.n_points {
        return Err(CliError::Config(format!(
            "{}: {} rows for a grid of {} points",
            path.display(),
            rows.len(),
            grid.n_points
        )));
    }
    let tol = 1e-9 * (grid.x_max - grid.x_min);
    for (j, r) in rows.iter().enumerate() {
        if (r[0] - grid.x(j)).abs() > tol {
            return Err(CliError::Config(format!(
                "{}: row {} has x = {} but grid point {j} is {}",
                path.display(),
                j + 1,
                r[0],
                grid.x(j)
            )));
        }
    }
    Ok(())
}

fn load_field(f: &FieldConfig, grid: &Grid, base: &Path) -> Result<Vec<Complex64>, CliError> {
    match f {
        FieldConfig::Gaussian(g) => Ok(grid.gaussian(g.x0, g.sigma, g.k0)),
        FieldConfig::Csv(CsvField { csv }) => {
            let path = resolve(base, csv);
            let rows = read_rows(&path, 3)?;
            check_abscissae(&path, &rows, grid)?;
            Ok(rows.iter().map(|r| Complex64::new(r[1], r[2])).collect())
        }
    }
}

pub fn meanfield_state(c: &MeanfieldConfig, base: &Path) -> Result<GridState, CliError> {
    let grid = Grid::new(c.x_min, c.x_max, c.points)?;
    let h00 = match &c.h00_csv {
        Some(p) => {
            let path = resolve(base, p);
            let rows = read_rows(&path, 2)?;
            check_abscissae(&path, &rows, &grid)?;
            Some(rows.iter().map(|r| r[1]).collect())
        }
        None => None,
    };
    let params = MeanFieldParams {
        m: c.m,
        m_g: c.m_g,
        g_newton: c.g_newton,
        d_spatial: c.d_spatial,
        source: c.source,
        softening: c.softening,
        v_o: c.v_o,
        k: c.k,
        c: c.c,
        h00,
    };
    let psi = load_field(&c.psi, &grid, base)?;
    let zeta = match &c.zeta {
        Some(f) => load_field(f, &grid, base)?,
        None => vec![Complex64::new(0.0, 0.0); grid.n_points],
    };
    Ok(GridState::new(grid, params, psi, zeta)?)
}

fn meanfield(c: &MeanfieldConfig, base: &Path) -> Result<Vec<Artifact>, CliError> {
    let mut state = meanfield_state(c, base)?;
    let ts = state.run(c.dt, c.steps, c.sample_every)?;
    Ok(vec![series_artifact(&ts)?])
}

// ---------------------------------------------------------------------------
// dimensional

fn dimensional_scenario(c: &DimensionalConfig) -> Result<Vec<Artifact>, CliError> {
    let table = dimensional::g11_table(c.g, &c.radii)?;
    let header = ["a".to_string(), "g11_over_pi7".to_string()];
    let rows: Vec<Vec<String>> = table.iter().map(|(a, v)| vec![fmt_sci(*a), fmt_sci(*v)]).collect();
    let ratio = dimensional::density_ratio(c.energy, c.c, c.length, c.compact_radius, c.mass)?;
    let mass = dimensional::gravonon_mass(c.k, c.c)?;
    let mut report = Report::default();
    report
        .num("rho_grav", ratio.rho_grav)
        .num("rho_2d", ratio.rho_2d)
        .num("density_ratio", ratio.full_quotient)
        .num("density_ratio_short_form", ratio.short_form)
        .num("m_g", mass.m_g)
        .num("v_o", mass.v_o);
    Ok(vec![table_artifact(&header, &rows)?, report.artifact()])
}

// ---------------------------------------------------------------------------
// sweep

pub const CHOOSER_SWEEP_PARAMETERS: [&str; 7] = ["w_over_u", "v", "w", "u", "delta", "n", "alpha"];
pub const TELEGRAPH_SWEEP_PARAMETERS: [&str; 6] = ["hop", "e_g", "e_w", "v_loc", "eps_grav", "v_gw"];

fn sweep(config: &Config) -> Result<Vec<Artifact>, CliError> {
    let s = section(&config.sweep)?;
    check_sweep(s)?;
    let header: Vec<String> = match s.model {
        SweepModel::Chooser => ["index", "value", "gamma", "plateau", "decay_rate"].map(String::from).to_vec(),
        SweepModel::Telegraph => [
            "index",
            "value",
            "crossings",
            "near_site1",
            "near_site2",
            "separation_site1",
            "separation_site2",
            "telegraph",
        ]
        .map(String::from)
        .to_vec(),
    };
    let rows: Vec<Vec<String>> = match s.model {
        SweepModel::Chooser => {
            let base = section(&config.chooser)?;
            s.values
                .par_iter()
                .enumerate()
                .map(|(i, &v)| chooser_point(base, &s.parameter, v).map(|r| row(i, v, r)))
                .collect::<Result<_, _>>()?
        }
        SweepModel::Telegraph => {
            let base = section(&config.telegraph)?;
            s.values
                .par_iter()
                .enumerate()
                .map(|(i, &v)| telegraph_point(base, &s.parameter, v).map(|r| row(i, v, r)))
                .collect::<Result<_, _>>()?
        }
    };
    Ok(vec![table_artifact(&header, &rows)?])
}

fn row(i: usize, v: f64, rest: Vec<String>) -> Vec<String> {
    let mut r = vec![i.to_string(), fmt_sci(v)];
    r.extend(rest);
    r
}

pub fn check_sweep(s: &SweepConfig) -> Result<(), CliError> {
    let known: &[&str] = match s.model {
        SweepModel::Chooser => &CHOOSER_SWEEP_PARAMETERS,
        SweepModel::Telegraph => &TELEGRAPH_SWEEP_PARAMETERS,
    };
    if !known.contains(&s.parameter.as_str()) {
        return Err(CliError::Config(format!(
            "sweep.parameter `{}` is not one of {}",
            s.parameter,
            known.join(", ")
        )));
    }
    if s.values.len() > s.max_points {
        return Err(emerge_core::Error::SizeLimit { what: "sweep grid", cap: s.max_points }.into());
    }
    if let Some(v) = s.values.iter().find(|v| !v.is_finite()) {
        return Err(CliError::Config(format!("sweep value {v} is not finite")));
    }
    if s.parameter == "n" {
        if let Some(v) = s.values.iter().find(|v| v.fract() != 0.0 || **v < 0.0) {
            return Err(CliError::Config(format!("sweep over n needs non-negative integers, got {v}")));
        }
    }
    Ok(())
}

/// Least-squares slope of `y` against `x`.
pub fn fitted_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChooserSummary {
    pub gamma: f64,
    /// Mean band weight over `[5/Γ, 10/Γ]`.
    pub plateau: f64,
    /// Minus the slope of `ln|⟨Kproj|Ψ⟩|²` over `[0.5/Γ, 3/Γ]`.
    pub decay_rate: f64,
}

pub fn chooser_summary(p: &ChooserParams) -> Result<ChooserSummary, CliError> {
    let gamma = chooser_gamma(p)?;
    if !(gamma > 0.0) {
        return Err(CliError::Config("sweep point has Γ = 0; no decay window".into()));
    }
    let fit_times = propagator::linear_grid(0.5 / gamma, 3.0 / gamma, 200);
    let late_times = propagator::linear_grid(5.0 / gamma, 10.0 / gamma, 401);
    let h = build_chooser(p)?;
    let d = propagator::diagonalize(&h)?;
    let psi0 = chooser_initial(p, h.dim())?;
    let fit: Vec<f64> = propagator::evolve(&d, &psi0, &fit_times)?
        .iter()
        .map(|s| s[chooser_index::K_PROJ].norm_sqr().ln())
        .collect();
    let late = propagator::evolve(&d, &psi0, &late_times)?;
    let plateau = late
        .iter()
        .map(|s| s.iter().skip(chooser_index::BAND_START).map(|z| z.norm_sqr()).sum::<f64>())
        .sum::<f64>()
        / late.len() as f64;
    Ok(ChooserSummary { gamma, plateau, decay_rate: -fitted_slope(&fit_times, &fit) })
}

fn chooser_point(base: &ChooserConfig, parameter: &str, v: f64) -> Result<Vec<String>, CliError> {
    let mut c = base.clone();
    match parameter {
        "w_over_u" => c.w = v * c.u,
        "v" => c.v = v,
        "w" => c.w = v,
        "u" => c.u = v,
        "delta" => c.delta = Some(v),
        "n" => c.n = v as usize,
        "alpha" => c.alpha = v,
        other => return Err(CliError::Config(format!("unknown chooser sweep parameter `{other}`"))),
    }
    let s = chooser_summary(&chooser_params(&c)?)?;
    Ok(vec![fmt_sci(s.gamma), fmt_sci(s.plateau), fmt_sci(s.decay_rate)])
}

fn telegraph_point(base: &TelegraphConfig, parameter: &str, v: f64) -> Result<Vec<String>, CliError> {
    let mut p = telegraph_params(base)?;
    for s in &mut p.sites {
        match parameter {
            "e_g" => s.e_g = v,
            "e_w" => s.e_w = v,
            "v_loc" => s.v_loc = v,
            "eps_grav" => s.eps_grav = v,
            "v_gw" => s.v_gw = v,
            _ => {}
        }
    }
    match parameter {
        "hop" => p.hop = v,
        "e_g" | "e_w" | "v_loc" | "eps_grav" | "v_gw" => {}
        other => return Err(CliError::Config(format!("unknown telegraph sweep parameter `{other}`"))),
    }
    let times = telegraph_times(&p, None)?;
    let run = telegraph_run(&p, telegraph_initial_site(base)?, &times)?;
    let stats = SwitchingStats::of(
        run.series.channel("site1").expect("site1 channel"),
        run.series.channel("site2").expect("site2 channel"),
    );
    let [a, b] = stats.channels;
    Ok(vec![
        stats.crossings.to_string(),
        fmt_sci(a.near_fraction),
        fmt_sci(b.near_fraction),
        fmt_sci(a.separation()),
        fmt_sci(b.separation()),
        u8::from(stats.is_telegraph(2, 0.8)).to_string(),
    ])
}
