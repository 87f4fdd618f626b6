//! Two-site adsorbate runs and the statistics used to tell telegraph-like
//! switching from smooth oscillation.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{Basis, ModeSpace, OccupationConfig};
use crate::models::{build_telegraph, SiteParams, TelegraphLayout, TelegraphParams};
use crate::propagator::{self, Group, StateVector};
use crate::series::TimeSeries;

/// Distance from a plateau that still counts as sitting on it.
pub const PLATEAU_TOLERANCE: f64 = 0.15;
/// Dead band on the channel difference before a crossing is counted.
pub const CROSSING_MARGIN: f64 = 0.05;

/// `n` evenly spaced energies spanning `[center − width/2, center + width/2]`.
pub fn flat_band(center: f64, width: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![center],
        _ => (0..n)
            .map(|k| center - width / 2.0 + width * k as f64 / (n - 1) as f64)
            .collect(),
    }
}

/// Recurrence time `2π/δ` of the coarser of the two bands, δ its smallest
/// level spacing; `None` if a band has fewer than two levels.
pub fn recurrence_time(p: &TelegraphParams) -> Option<f64> {
    p.sites
        .iter()
        .map(|s| {
            s.band
                .windows(2)
                .map(|w| w[1] - w[0])
                .filter(|d| *d > 0.0)
                .fold(None, |acc: Option<f64>, d| Some(acc.map_or(d, |a| a.min(d))))
        })
        .try_fold(0.0f64, |acc, d| d.map(|d| acc.max(2.0 * PI / d)))
}

/// The documented two-site configuration with 20 continuum levels per
/// site.
pub fn reference_params() -> TelegraphParams {
    let site = |e_g: f64, eps_grav: f64, center: f64, width: f64, v_loc: f64, v_gw: f64| SiteParams {
        e_g,
        e_w: 0.0,
        v_loc,
        eps_grav,
        band: flat_band(center, width, 20),
        v_gw,
    };
    TelegraphParams {
        sites: [
            site(REF[0], REF[1], REF[2], REF[3], REF[4], REF[5]),
            site(REF[6], REF[7], REF[8], REF[9], REF[10], REF[11]),
        ],
        hop: REF[12],
    }
}

// e_g, eps_grav, band centre, band width, v_loc, v_gw for each site, then hop
const REF: [f64; 13] = [
    -0.5967052546173497,
    -0.24501711252526898,
    0.1509938921969515,
    0.842682968837365,
    0.7656689769082705,
    0.5668852472781103,
    -0.7038309101223824,
    -0.27958155960035735,
    0.15091497995214073,
    0.9525082466309939,
    0.6671216133257677,
    0.46731100271663745,
    0.5923352793390741,
];

/// Particle in the core state of `site`, both gravonon quanta local.
pub fn initial_config(layout: &TelegraphLayout, site: usize) -> OccupationConfig {
    let mut matter = vec![0; TelegraphLayout::N_MATTER];
    matter[TelegraphLayout::g(site)] = 1;
    let mut grav = vec![0; layout.n_grav()];
    grav[layout.local(0)] = 1;
    grav[layout.local(1)] = 1;
    OccupationConfig::new(matter, grav)
}

/// Configurations in which the gravonon quantum of `site` sits in its
/// continuum.
pub fn site_group(basis: &Basis, layout: &TelegraphLayout, site: usize) -> Group {
    let band = layout.local(site) + 1..layout.site_modes(site).end;
    let indices = basis
        .configs()
        .iter()
        .enumerate()
        .filter(|(_, c)| band.clone().any(|m| c.grav[m] > 0))
        .map(|(i, _)| i)
        .collect();
    Group::new(format!("site{}", site + 1), indices)
}

#[derive(Debug, Clone)]
pub struct TelegraphRun {
    /// Channels `site1`, `site2` and `norm`.
    pub series: TimeSeries,
    pub basis_size: usize,
}

/// Propagates the model from `initial` and records the continuum weight of
/// each site.
pub fn simulate(p: &TelegraphParams, space: &ModeSpace, initial: &OccupationConfig, times: &[f64]) -> Result<TelegraphRun> {
    let layout = p.layout();
    let h = build_telegraph(p, space)?;
    let basis = Basis::new(space.clone())?;
    let start = basis
        .index_of(initial)
        .ok_or_else(|| Error::BasisMismatch(format!("initial configuration {initial} is not in the basis")))?;
    let mut psi0 = StateVector::from_element(basis.len(), Complex64::new(0.0, 0.0));
    psi0[start] = Complex64::new(1.0, 0.0);
    let d = propagator::diagonalize(&h)?;
    let states = propagator::evolve(&d, &psi0, times)?;
    let groups = [site_group(&basis, &layout, 0), site_group(&basis, &layout, 1)];
    let mut series = propagator::occupation_weights(times, &states, &groups)?.series;
    series.push_channel("norm", states.iter().map(|s| s.norm_squared()).collect())?;
    Ok(TelegraphRun { series, basis_size: basis.len() })
}

/// Low and high plateau of a signal by one-dimensional two-means.
pub fn plateaus(values: &[f64]) -> (f64, f64) {
    let (mut lo, mut hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &x| (a.min(x), b.max(x)));
    for _ in 0..100 {
        let mid = 0.5 * (lo + hi);
        let (mut sl, mut nl, mut sh, mut nh) = (0.0, 0usize, 0.0, 0usize);
        for &x in values {
            if x <= mid {
                sl += x;
                nl += 1;
            } else {
                sh += x;
                nh += 1;
            }
        }
        if nl == 0 || nh == 0 {
            break;
        }
        let (l, h) = (sl / nl as f64, sh / nh as f64);
        if l == lo && h == hi {
            break;
        }
        lo = l;
        hi = h;
    }
    (lo, hi)
}

/// Sign changes of `a − b`, ignoring excursions inside `±margin`.
pub fn crossings(a: &[f64], b: &[f64], margin: f64) -> usize {
    let mut side = 0i8;
    let mut n = 0;
    for (x, y) in a.iter().zip(b) {
        let d = x - y;
        let s = if d > margin {
            1
        } else if d < -margin {
            -1
        } else {
            continue;
        };
        if side != 0 && s != side {
            n += 1;
        }
        side = s;
    }
    n
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChannelStats {
    pub low: f64,
    pub high: f64,
    /// Fraction of samples within the tolerance of either plateau.
    pub near_fraction: f64,
    pub low_fraction: f64,
    pub high_fraction: f64,
}

impl ChannelStats {
    pub fn of(values: &[f64], tolerance: f64) -> Self {
        let (low, high) = plateaus(values);
        let n = values.len().max(1) as f64;
        let count = |f: &dyn Fn(f64) -> bool| values.iter().filter(|&&x| f(x)).count() as f64 / n;
        ChannelStats {
            low,
            high,
            near_fraction: count(&|x| (x - low).abs() <= tolerance || (x - high).abs() <= tolerance),
            low_fraction: count(&|x| (x - low).abs() <= tolerance),
            high_fraction: count(&|x| (x - high).abs() <= tolerance),
        }
    }

    pub fn separation(&self) -> f64 {
        self.high - self.low
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwitchingStats {
    pub crossings: usize,
    pub channels: [ChannelStats; 2],
}

impl SwitchingStats {
    pub fn of(site1: &[f64], site2: &[f64]) -> Self {
        SwitchingStats {
            crossings: crossings(site1, site2, CROSSING_MARGIN),
            channels: [ChannelStats::of(site1, PLATEAU_TOLERANCE), ChannelStats::of(site2, PLATEAU_TOLERANCE)],
        }
    }

    /// At least `min_crossings` alternations with both channels on a
    /// plateau for at least `min_near` of the run.
    pub fn is_telegraph(&self, min_crossings: usize, min_near: f64) -> bool {
        self.crossings >= min_crossings && self.channels.iter().all(|c| c.near_fraction >= min_near)
    }
}
