//! Order-of-magnitude estimates for gravity with compactified extra
//! dimensions, all in Hartree atomic units.

use std::f64::consts::PI;

use crate::error::{Error, Result};

pub const HARTREE_EV: f64 = 27.2114;

/// Radii (bohr) of the standard G^(11) table.
pub const TABLE_RADII: [f64; 4] = [1e4, 1e3, 1e2, 10.0];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub g: f64,
    pub c: f64,
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        PhysicalConstants { g: 1e-40, c: 137.036 }
    }
}

impl PhysicalConstants {
    pub fn validate(&self) -> Result<()> {
        positive("G", self.g)?;
        positive("c", self.c)
    }
}

fn positive(name: &'static str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(Error::param(name, format!("must be positive and finite, got {x}")))
    }
}

pub fn hartree_to_ev(e: f64) -> f64 {
    e * HARTREE_EV
}

pub fn ev_to_hartree(e: f64) -> f64 {
    e / HARTREE_EV
}

/// Newtonian potential `−GM/r`.
pub fn v_grav_4d(g: f64, m: f64, r: f64) -> Result<f64> {
    positive("r", r)?;
    Ok(-g * m / r)
}

/// Short-range potential in ten space dimensions, `−G11·M/(π⁷r⁸)`.
pub fn v_grav_11d(g11: f64, m: f64, r: f64) -> Result<f64> {
    positive("r", r)?;
    Ok(-g11 * m / (PI.powi(7) * r.powi(8)))
}

/// `G11 = (2aπ)⁷G`, from matching both laws once r exceeds the
/// compactification scale.
pub fn g11_from_compactification(g: f64, a: f64) -> Result<f64> {
    positive("a", a)?;
    Ok((2.0 * a * PI).powi(7) * g)
}

/// `(2a)⁷`: how much stronger the short-range law is than Newton at r = 1.
pub fn enhancement_factor(a: f64) -> Result<f64> {
    positive("a", a)?;
    Ok((2.0 * a).powi(7))
}

/// Rows `(a, G11/π⁷)` for each radius.
pub fn g11_table(g: f64, radii: &[f64]) -> Result<Vec<(f64, f64)>> {
    radii
        .iter()
        .map(|&a| Ok((a, g11_from_compactification(g, a)? / PI.powi(7))))
        .collect()
}

/// Density of graviton modes per unit energy for the dispersion `E = κc`
/// in `d` space dimensions.
///
/// The k-space density is `(L/π)` per extended dimension (at most three)
/// and `(a/π)` per compact one. For `d = 1` the counted interval is the
/// half-line of standing waves, so the result is `L/(πc)`; for `d ≥ 2` the
/// full ball volume `π^{d/2}/Γ(1+d/2)` is used.
pub fn mode_density(e: f64, c: f64, d: u32, l: f64, a: f64) -> Result<f64> {
    if d == 0 {
        return Err(Error::param("d", "dimension must be at least 1"));
    }
    positive("E", e)?;
    positive("c", c)?;
    positive("L", l)?;
    if d > 3 {
        positive("a", a)?;
    }
    let extended = d.min(3) as i32;
    let compact = d.saturating_sub(3) as i32;
    let rho_k = (l / PI).powi(extended) * (a / PI).powi(compact);
    let angular = if d == 1 { 1.0 } else { ball_volume(d) };
    Ok(e.powi(d as i32 - 1) / c.powi(d as i32) * angular * rho_k)
}

/// Volume of the unit ball in `d` dimensions, `π^{d/2}/Γ(1+d/2)`.
fn ball_volume(d: u32) -> f64 {
    // Γ(1+d/2) via the half-integer recursion
    let mut gamma = if d % 2 == 0 { 1.0 } else { PI.sqrt() / 2.0 };
    let mut x = if d % 2 == 0 { 1.0 } else { 1.5 };
    while x < 1.0 + d as f64 / 2.0 - 1e-9 {
        gamma *= x;
        x += 1.0;
    }
    PI.powf(d as f64 / 2.0) / gamma
}

/// Density of states of a particle of mass M moving freely on an L×L
/// square, `2ML²/π`.
pub fn rho_2d(m: f64, l: f64) -> f64 {
    2.0 * m * l * l / PI
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityRatio {
    pub rho_grav: f64,
    pub rho_2d: f64,
    /// `rho_grav / rho_2d`.
    pub full_quotient: f64,
    /// `(E⁹/c¹⁰)(π⁵/5!)·L·a⁷/π⁹`, which lacks the `1/(2M)` of the full quotient.
    pub short_form: f64,
}

pub fn density_ratio(e: f64, c: f64, l: f64, a: f64, m: f64) -> Result<DensityRatio> {
    positive("M", m)?;
    let rho_grav = mode_density(e, c, 10, l, a)?;
    let rho_2d = rho_2d(m, l);
    let short_form = e.powi(9) / c.powi(10) * PI.powi(5) / 120.0 * l * a.powi(7) / PI.powi(9);
    Ok(DensityRatio { rho_grav, rho_2d, full_quotient: rho_grav / rho_2d, short_form })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GravononMass {
    pub m_g: f64,
    pub v_o: f64,
}

/// `m_g = k/c` with the companion constant potential `V_o = −kc/2`.
pub fn gravonon_mass(k: f64, c: f64) -> Result<GravononMass> {
    positive("k", k)?;
    positive("c", c)?;
    Ok(GravononMass { m_g: k / c, v_o: -k * c / 2.0 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SiteSelection {
    pub energy_spacing: f64,
    pub geometry_spacing: f64,
    /// Sites whose geometry differs by at least the resolution.
    pub filtered_sites: f64,
    pub filtered_energy_spacing: f64,
}

/// Level spacings a site-selecting mechanism must resolve.
///
/// A geometric filter of resolution `r` keeps a fraction `r/geometry_spread`
/// of the sites (never more than all of them, never fewer than one).
pub fn site_selection_scales(
    energy_spread: f64,
    geometry_spread: f64,
    n_sites: f64,
    geometry_resolution: f64,
) -> Result<SiteSelection> {
    if !(n_sites >= 1.0) {
        return Err(Error::param("n_sites", format!("must be at least 1, got {n_sites}")));
    }
    positive("geometry_spread", geometry_spread)?;
    positive("geometry_resolution", geometry_resolution)?;
    let filtered = (n_sites * geometry_resolution / geometry_spread).clamp(1.0, n_sites);
    Ok(SiteSelection {
        energy_spacing: energy_spread / n_sites,
        geometry_spacing: geometry_spread / n_sites,
        filtered_sites: filtered,
        filtered_energy_spacing: energy_spread / filtered,
    })
}
