//! Hamiltonian assembly for the chooser model, the two-site adsorbate
//! (telegraph) model and generic second-quantized term lists.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fock::{apply_product, Basis, Ladder, LadderOutcome, Mode, ModeSpace, OccupationConfig};

/// A Hermitian matrix over a labelled basis.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianMatrix {
    entries: DMatrix<Complex64>,
    labels: Vec<String>,
}

impl HamiltonianMatrix {
    /// Wraps `entries`; fails unless the matrix is square, matches the label
    /// count and is Hermitian entrywise (exact comparison).
    pub fn new(entries: DMatrix<Complex64>, labels: Vec<String>) -> Result<Self> {
        if !entries.is_square() || entries.nrows() != labels.len() {
            return Err(Error::Dimension(format!(
                "{}x{} matrix with {} labels",
                entries.nrows(),
                entries.ncols(),
                labels.len()
            )));
        }
        let h = HamiltonianMatrix { entries, labels };
        h.check_hermitian()?;
        Ok(h)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn entries(&self) -> &DMatrix<Complex64> {
        &self.entries
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[(i, j)]
    }

    pub fn check_hermitian(&self) -> Result<()> {
        let n = self.entries.nrows();
        for i in 0..n {
            for j in i..n {
                if self.entries[(i, j)] != self.entries[(j, i)].conj() {
                    return Err(Error::contract(
                        "hermiticity",
                        format!("H[{i}][{j}] = {} but H[{j}][{i}] = {}", self.entries[(i, j)], self.entries[(j, i)]),
                    ));
                }
            }
        }
        Ok(())
    }

    /// Every entry multiplied by `s` (real).
    pub fn scaled(&self, s: f64) -> Self {
        HamiltonianMatrix {
            entries: self.entries.map(|z| z * s),
            labels: self.labels.clone(),
        }
    }
}

// ---------------------------------------------------------------------------
// Chooser model

/// How the N band levels are laid out relative to the width Δ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BandLayout {
    /// N levels evenly spaced over `[-Δ/2, Δ/2]`.
    #[default]
    Interval,
    /// `|ε| < Δ`: 2N levels evenly spaced over `[-Δ, Δ]`, so that N levels
    /// fall in every energy window of length Δ.
    Symmetric,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChooserParams {
    /// Source to screen coupling.
    pub v: f64,
    /// Screen to warp-resonance coupling.
    pub w: f64,
    /// Number of band levels per energy length Δ.
    pub n: usize,
    /// Band width Δ.
    pub delta: f64,
    /// Band coupling scale; each band level couples with U/√N.
    pub u: f64,
    /// Real self-energy shift placed on the projected state.
    pub alpha: f64,
    pub layout: BandLayout,
}

impl ChooserParams {
    pub fn new(v: f64, w: f64, n: usize, delta: f64, u: f64) -> Self {
        ChooserParams { v, w, n, delta, u, alpha: 0.0, layout: BandLayout::Interval }
    }

    pub fn with_alpha(mut self, alpha: f64) -> Self {
        self.alpha = alpha;
        self
    }

    pub fn with_layout(mut self, layout: BandLayout) -> Self {
        self.layout = layout;
        self
    }

    pub fn validate(&self) -> Result<()> {
        for (name, x) in [("V", self.v), ("W", self.w), ("U", self.u), ("alpha", self.alpha)] {
            if !x.is_finite() {
                return Err(Error::param(name, "must be finite"));
            }
        }
        if self.n > 0 && !(self.delta > 0.0 && self.delta.is_finite()) {
            return Err(Error::param("delta", format!("band width must be positive, got {}", self.delta)));
        }
        Ok(())
    }

    /// Band level energies ε_κ in ascending order.
    pub fn band_energies(&self) -> Vec<f64> {
        let (count, half) = match self.layout {
            BandLayout::Interval => (self.n, self.delta / 2.0),
            BandLayout::Symmetric => (2 * self.n, self.delta),
        };
        match count {
            0 => Vec::new(),
            1 => vec![0.0],
            _ => (0..count)
                .map(|k| -half + 2.0 * half * k as f64 / (count - 1) as f64)
                .collect(),
        }
    }

    /// Coupling of the projected state to every band level, U/√N.
    pub fn band_coupling(&self) -> f64 {
        if self.n == 0 {
            0.0
        } else {
            self.u / (self.n as f64).sqrt()
        }
    }
}

/// Basis positions of the chooser model.
pub mod chooser_index {
    pub const Q0: usize = 0;
    pub const R0: usize = 1;
    pub const K_PROJ: usize = 2;
    pub const BAND_START: usize = 3;
}

/// Builds the chooser Hamiltonian over `[|Q0⟩, |R0⟩, |Kκ_proj⟩, |Kκ_1⟩ …]`.
pub fn build_chooser(p: &ChooserParams) -> Result<HamiltonianMatrix> {
    use chooser_index::*;
    p.validate()?;
    let band = p.band_energies();
    let dim = BAND_START + band.len();
    let c = |x: f64| Complex64::new(x, 0.0);
    let mut m = DMatrix::from_element(dim, dim, c(0.0));
    m[(Q0, R0)] = c(p.v);
    m[(R0, Q0)] = c(p.v);
    m[(R0, K_PROJ)] = c(p.w);
    m[(K_PROJ, R0)] = c(p.w);
    m[(K_PROJ, K_PROJ)] = c(p.alpha);
    let wk = p.band_coupling();
    for (k, &eps) in band.iter().enumerate() {
        let i = BAND_START + k;
        m[(i, i)] = c(eps);
        m[(K_PROJ, i)] = c(wk);
        m[(i, K_PROJ)] = c(wk);
    }
    let mut labels = vec!["Q0".to_string(), "R0".to_string(), "Kproj".to_string()];
    labels.extend((1..=band.len()).map(|k| format!("K{k}")));
    HamiltonianMatrix::new(m, labels)
}

// ---------------------------------------------------------------------------
// Generic configuration-interaction terms

/// Operator shape of a CI term. Indices refer to matter (`a`) and gravonon
/// (`b`) modes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TermKind {
    /// a⁺_to a_from
    Matter { to: usize, from: usize },
    /// b⁺_to b_from
    Grav { to: usize, from: usize },
    /// a⁺_to a_from b⁺_grav_to b_grav_from
    Mixed { to: usize, from: usize, grav_to: usize, grav_from: usize },
}

impl TermKind {
    fn ops(&self) -> Vec<(Mode, Ladder)> {
        match *self {
            TermKind::Matter { to, from } => vec![
                (Mode::Matter(to), Ladder::Raise),
                (Mode::Matter(from), Ladder::Lower),
            ],
            TermKind::Grav { to, from } => vec![
                (Mode::Grav(to), Ladder::Raise),
                (Mode::Grav(from), Ladder::Lower),
            ],
            TermKind::Mixed { to, from, grav_to, grav_from } => vec![
                (Mode::Matter(to), Ladder::Raise),
                (Mode::Matter(from), Ladder::Lower),
                (Mode::Grav(grav_to), Ladder::Raise),
                (Mode::Grav(grav_from), Ladder::Lower),
            ],
        }
    }

    /// True when the operator equals its own adjoint.
    pub fn is_self_adjoint(&self) -> bool {
        match *self {
            TermKind::Matter { to, from } | TermKind::Grav { to, from } => to == from,
            TermKind::Mixed { to, from, grav_to, grav_from } => to == from && grav_to == grav_from,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CiTerm {
    pub kind: TermKind,
    pub coefficient: Complex64,
}

impl CiTerm {
    pub fn new(kind: TermKind, coefficient: f64) -> Self {
        CiTerm { kind, coefficient: Complex64::new(coefficient, 0.0) }
    }
}

fn config_labels(basis: &Basis) -> Vec<String> {
    basis.configs().iter().map(OccupationConfig::to_string).collect()
}

/// Assembles `Σ terms + h.c.` over the enumerated basis of `space`.
///
/// Self-adjoint terms (number operators and their products) are added once
/// and must carry a real coefficient; every other term is added together with
/// its Hermitian conjugate. Contributions that leave the truncated space are
/// projected out.
pub fn build_generic_ci(space: &ModeSpace, terms: &[CiTerm]) -> Result<HamiltonianMatrix> {
    let basis = Basis::new(space.clone())?;
    build_generic_ci_on(&basis, terms)
}

pub fn build_generic_ci_on(basis: &Basis, terms: &[CiTerm]) -> Result<HamiltonianMatrix> {
    let space = basis.space();
    for t in terms {
        let (m, g) = match t.kind {
            TermKind::Matter { to, from } => (vec![to, from], vec![]),
            TermKind::Grav { to, from } => (vec![], vec![to, from]),
            TermKind::Mixed { to, from, grav_to, grav_from } => (vec![to, from], vec![grav_to, grav_from]),
        };
        if let Some(bad) = m.iter().find(|&&i| i >= space.n_matter()) {
            return Err(Error::param("terms", format!("matter index {bad} out of range 0..{}", space.n_matter())));
        }
        if let Some(bad) = g.iter().find(|&&i| i >= space.n_grav()) {
            return Err(Error::param("terms", format!("gravonon index {bad} out of range 0..{}", space.n_grav())));
        }
        if t.kind.is_self_adjoint() && t.coefficient.im != 0.0 {
            return Err(Error::param("terms", "self-adjoint term needs a real coefficient"));
        }
        if !t.coefficient.is_finite() {
            return Err(Error::param("terms", "coefficient must be finite"));
        }
    }

    let n = basis.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));
    for t in terms {
        let ops = t.kind.ops();
        let hermitian_pair = !t.kind.is_self_adjoint();
        for (j, cfg) in basis.configs().iter().enumerate() {
            let LadderOutcome::State(out, amp) = apply_product(space, cfg, &ops)? else {
                continue;
            };
            let Some(i) = basis.index_of(&out) else { continue };
            m[(i, j)] += t.coefficient * amp;
            if hermitian_pair {
                m[(j, i)] += t.coefficient.conj() * amp;
            }
        }
    }
    HamiltonianMatrix::new(m, config_labels(basis))
}

// ---------------------------------------------------------------------------
// Two-site adsorbate model

/// Parameters of one adsorption site.
#[derive(Debug, Clone, PartialEq)]
pub struct SiteParams {
    /// Energy of the gas-particle core state g.
    pub e_g: f64,
    /// Energy of the warp resonance w.
    pub e_w: f64,
    /// g ↔ w coupling.
    pub v_loc: f64,
    /// Local gravonon quantum.
    pub eps_grav: f64,
    /// Continuum gravonon energies, ascending.
    pub band: Vec<f64>,
    /// Local ↔ continuum gravonon coupling, active only while the particle
    /// sits in the warp resonance.
    pub v_gw: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TelegraphParams {
    pub sites: [SiteParams; 2],
    /// Particle hopping between the two core states, a⁺_g1 a_g2 + h.c.
    /// Zero leaves the sites dynamically independent.
    pub hop: f64,
}

impl TelegraphParams {
    pub fn validate(&self) -> Result<()> {
        for s in &self.sites {
            let scalars = [s.e_g, s.e_w, s.v_loc, s.eps_grav, s.v_gw];
            if scalars.iter().chain(&s.band).any(|x| !x.is_finite()) || !self.hop.is_finite() {
                return Err(Error::param("telegraph", "all energies and couplings must be finite"));
            }
            if s.band.windows(2).any(|w| w[0] > w[1]) {
                return Err(Error::param("band", "band energies must be sorted ascending"));
            }
        }
        Ok(())
    }

    pub fn layout(&self) -> TelegraphLayout {
        TelegraphLayout {
            band_len: [self.sites[0].band.len(), self.sites[1].band.len()],
        }
    }
}

/// Mode numbering of the adsorbate model.
///
/// Matter modes are `[g1, g2, w1, w2]`; gravonon modes are grouped per site
/// as `[grav1, band1…, grav2, band2…]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TelegraphLayout {
    pub band_len: [usize; 2],
}

impl TelegraphLayout {
    pub const N_MATTER: usize = 4;

    pub fn g(site: usize) -> usize {
        site
    }

    pub fn w(site: usize) -> usize {
        2 + site
    }

    pub fn n_grav(&self) -> usize {
        2 + self.band_len[0] + self.band_len[1]
    }

    /// Gravonon modes belonging to `site`.
    pub fn site_modes(&self, site: usize) -> std::ops::Range<usize> {
        let start = if site == 0 { 0 } else { 1 + self.band_len[0] };
        start..start + 1 + self.band_len[site]
    }

    pub fn local(&self, site: usize) -> usize {
        self.site_modes(site).start
    }

    pub fn band(&self, site: usize, k: usize) -> usize {
        self.local(site) + 1 + k
    }

    /// Single particle, one gravonon quantum held by each site.
    pub fn default_space(&self) -> Result<ModeSpace> {
        ModeSpace::new(Self::N_MATTER, self.n_grav(), 1)?
            .with_sector(1)
            .with_grav_group(self.site_modes(0), 1)?
            .with_grav_group(self.site_modes(1), 1)
    }
}

/// Builds the adsorbate Hamiltonian by acting with each term's operator
/// string on the enumerated configurations of `space`.
pub fn build_telegraph(p: &TelegraphParams, space: &ModeSpace) -> Result<HamiltonianMatrix> {
    p.validate()?;
    let layout = p.layout();
    if space.n_matter() != TelegraphLayout::N_MATTER || space.n_grav() != layout.n_grav() {
        return Err(Error::BasisMismatch(format!(
            "adsorbate model needs {} matter and {} gravonon modes, space has {} and {}",
            TelegraphLayout::N_MATTER,
            layout.n_grav(),
            space.n_matter(),
            space.n_grav()
        )));
    }
    let basis = Basis::new(space.clone())?;
    let n = basis.len();
    let mut m = DMatrix::from_element(n, n, Complex64::new(0.0, 0.0));

    // off-diagonal strings with their real coefficients; each is added with its adjoint
    let mut strings: Vec<(f64, Vec<(Mode, Ladder)>)> = Vec::new();
    for (site, s) in p.sites.iter().enumerate() {
        strings.push((
            s.v_loc,
            vec![
                (Mode::Matter(TelegraphLayout::g(site)), Ladder::Raise),
                (Mode::Matter(TelegraphLayout::w(site)), Ladder::Lower),
            ],
        ));
        let w = Mode::Matter(TelegraphLayout::w(site));
        for k in 0..s.band.len() {
            // n_w b⁺_grav b_k, with n_w written as a⁺_w a_w
            strings.push((
                s.v_gw,
                vec![
                    (w, Ladder::Raise),
                    (w, Ladder::Lower),
                    (Mode::Grav(layout.local(site)), Ladder::Raise),
                    (Mode::Grav(layout.band(site, k)), Ladder::Lower),
                ],
            ));
        }
    }
    if p.hop != 0.0 {
        strings.push((
            p.hop,
            vec![
                (Mode::Matter(TelegraphLayout::g(0)), Ladder::Raise),
                (Mode::Matter(TelegraphLayout::g(1)), Ladder::Lower),
            ],
        ));
    }

    for (j, cfg) in basis.configs().iter().enumerate() {
        let mut diag = 0.0;
        for (site, s) in p.sites.iter().enumerate() {
            diag += s.e_g * f64::from(cfg.matter[TelegraphLayout::g(site)]);
            diag += s.e_w * f64::from(cfg.matter[TelegraphLayout::w(site)]);
            diag += s.eps_grav * f64::from(cfg.grav[layout.local(site)]);
            for (k, eps) in s.band.iter().enumerate() {
                diag += eps * f64::from(cfg.grav[layout.band(site, k)]);
            }
        }
        m[(j, j)] += Complex64::new(diag, 0.0);

        for (coeff, ops) in &strings {
            if *coeff == 0.0 {
                continue;
            }
            if let LadderOutcome::State(out, amp) = apply_product(space, cfg, ops)? {
                if let Some(i) = basis.index_of(&out) {
                    let x = Complex64::new(coeff * amp, 0.0);
                    m[(i, j)] += x;
                    m[(j, i)] += x;
                }
            }
        }
    }
    HamiltonianMatrix::new(m, config_labels(&basis))
}

/// The term list equivalent to [`build_telegraph`], for use with
/// [`build_generic_ci`].
pub fn telegraph_terms(p: &TelegraphParams) -> Vec<CiTerm> {
    let layout = p.layout();
    let mut terms = Vec::new();
    for (site, s) in p.sites.iter().enumerate() {
        let (g, w) = (TelegraphLayout::g(site), TelegraphLayout::w(site));
        terms.push(CiTerm::new(TermKind::Matter { to: g, from: g }, s.e_g));
        terms.push(CiTerm::new(TermKind::Matter { to: w, from: w }, s.e_w));
        terms.push(CiTerm::new(TermKind::Matter { to: g, from: w }, s.v_loc));
        let local = layout.local(site);
        terms.push(CiTerm::new(TermKind::Grav { to: local, from: local }, s.eps_grav));
        for (k, &eps) in s.band.iter().enumerate() {
            let b = layout.band(site, k);
            terms.push(CiTerm::new(TermKind::Grav { to: b, from: b }, eps));
            terms.push(CiTerm::new(
                TermKind::Mixed { to: w, from: w, grav_to: local, grav_from: b },
                s.v_gw,
            ));
        }
    }
    if p.hop != 0.0 {
        terms.push(CiTerm::new(TermKind::Matter { to: TelegraphLayout::g(0), from: TelegraphLayout::g(1) }, p.hop));
    }
    terms
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::propagator::diagonalize;
    use proptest::prelude::*;

    fn real(h: &HamiltonianMatrix) -> DMatrix<f64> {
        h.entries().map(|z| z.re)
    }

    fn sorted_eigs(h: &HamiltonianMatrix) -> Vec<f64> {
        diagonalize(h).unwrap().eigenvalues
    }

    // roots of a real polynomial with only real roots, by bisection between
    // the sorted diagonal-free bracket [-R, R] with R the Cauchy bound
    fn real_roots(coeffs: &[f64]) -> Vec<f64> {
        let n = coeffs.len() - 1;
        let p = |x: f64| coeffs.iter().fold(0.0, |acc, &c| acc * x + c);
        let r = 1.0 + coeffs[1..].iter().map(|c| (c / coeffs[0]).abs()).fold(0.0, f64::max);
        let steps = 200_000;
        let mut roots = Vec::new();
        let mut prev = -r;
        for i in 1..=steps {
            let x = -r + 2.0 * r * i as f64 / steps as f64;
            if p(prev) == 0.0 {
                roots.push(prev);
            } else if p(prev) * p(x) < 0.0 {
                let (mut a, mut b) = (prev, x);
                for _ in 0..200 {
                    let m = 0.5 * (a + b);
                    if p(a) * p(m) <= 0.0 {
                        b = m;
                    } else {
                        a = m;
                    }
                }
                roots.push(0.5 * (a + b));
            }
            prev = x;
        }
        assert_eq!(roots.len(), n, "expected {n} simple real roots");
        roots
    }

    #[test]
    fn chooser_without_band() {
        let h = build_chooser(&ChooserParams::new(3.0, 4.0, 0, 0.0, 0.0)).unwrap();
        assert_eq!(h.dim(), 3);
        assert_eq!(h.labels(), ["Q0", "R0", "Kproj"]);
        let e = sorted_eigs(&h);
        for (x, y) in e.iter().zip([-5.0, 0.0, 5.0]) {
            assert!((x - y).abs() < 1e-12);
        }
        let zero = build_chooser(&ChooserParams::new(0.0, 0.0, 0, 1.0, 0.0)).unwrap();
        assert!(zero.entries().iter().all(|z| *z == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn chooser_characteristic_polynomial() {
        // det(E − H) for the 3×3 block is E³ − (V² + W²)E
        let (v, w) = (0.7, 1.3);
        let h = real(&build_chooser(&ChooserParams::new(v, w, 0, 1.0, 0.0)).unwrap());
        for e in [-2.0, -0.3, 0.0, 0.9, 1.7] {
            let det = (DMatrix::identity(3, 3) * e - &h).determinant();
            assert!((det - (e * e * e - (v * v + w * w) * e)).abs() < 1e-12);
        }
    }

    #[test]
    fn chooser_five_state_against_polynomial_roots() {
        let h = build_chooser(&ChooserParams::new(1.0, 1.0, 2, 2.0, 1.0)).unwrap();
        assert_eq!(h.dim(), 5);
        let hr = real(&h);
        assert_eq!(hr[(2, 3)], 1.0 / 2f64.sqrt());
        assert_eq!((hr[(3, 3)], hr[(4, 4)]), (-1.0, 1.0));
        // characteristic polynomial coefficients by interpolation at 6 points
        let xs: Vec<f64> = (0..6).map(|i| i as f64 - 2.5).collect();
        let ys: Vec<f64> = xs.iter().map(|&x| (DMatrix::identity(5, 5) * x - &hr).determinant()).collect();
        let vander = DMatrix::from_fn(6, 6, |i, j| xs[i].powi(5 - j as i32));
        let coeffs = vander.lu().solve(&nalgebra::DVector::from_vec(ys)).unwrap();
        let coeffs: Vec<f64> = coeffs.iter().copied().collect();
        assert!((coeffs[0] - 1.0).abs() < 1e-9, "monic of degree 5");
        let roots = real_roots(&coeffs);
        for (x, y) in sorted_eigs(&h).iter().zip(&roots) {
            assert!((x - y).abs() < 1e-10, "{x} vs {y}");
        }
    }

    #[test]
    fn chooser_band_layouts() {
        let p = ChooserParams::new(0.0, 0.0, 5, 2.0, 1.0);
        assert_eq!(p.band_energies(), vec![-1.0, -0.5, 0.0, 0.5, 1.0]);
        let s = p.clone().with_layout(BandLayout::Symmetric).band_energies();
        assert_eq!(s.len(), 10);
        assert_eq!((s[0], s[9]), (-2.0, 2.0));
        assert!(ChooserParams::new(1.0, 1.0, 3, 0.0, 1.0).validate().is_err());
        assert!(build_chooser(&ChooserParams::new(1.0, 1.0, 3, -1.0, 1.0)).is_err());
        let a = build_chooser(&ChooserParams::new(1.0, 1.0, 0, 0.0, 1.0).with_alpha(0.25)).unwrap();
        assert_eq!(a.get(2, 2).re, 0.25);
    }

    #[test]
    fn hermiticity_enforced() {
        let mut m = DMatrix::from_element(2, 2, Complex64::new(0.0, 0.0));
        m[(0, 1)] = Complex64::new(1.0, 1.0);
        m[(1, 0)] = Complex64::new(1.0, 1.0);
        assert!(matches!(
            HamiltonianMatrix::new(m.clone(), vec!["a".into(), "b".into()]),
            Err(Error::Contract { .. })
        ));
        m[(1, 0)] = Complex64::new(1.0, -1.0);
        assert!(HamiltonianMatrix::new(m.clone(), vec!["a".into(), "b".into()]).is_ok());
        assert!(HamiltonianMatrix::new(m, vec!["a".into()]).is_err());
    }

    fn small_telegraph(n_band: usize) -> TelegraphParams {
        let site = |e_g: f64, e_w: f64, v: f64, c: f64| SiteParams {
            e_g,
            e_w,
            v_loc: v,
            eps_grav: 0.2,
            band: (0..n_band).map(|k| c + 0.1 * k as f64).collect(),
            v_gw: 0.05,
        };
        TelegraphParams { sites: [site(-0.4, 0.1, 0.3, -0.2), site(-0.35, 0.05, 0.25, -0.1)], hop: 0.07 }
    }

    #[test]
    fn telegraph_uncoupled_is_diagonal() {
        let mut p = small_telegraph(3);
        p.hop = 0.0;
        for s in &mut p.sites {
            s.v_loc = 0.0;
            s.v_gw = 0.0;
        }
        let layout = p.layout();
        let space = layout.default_space().unwrap();
        let h = build_telegraph(&p, &space).unwrap();
        let basis = Basis::new(space).unwrap();
        for (j, c) in basis.configs().iter().enumerate() {
            let mut e = 0.0;
            for (site, s) in p.sites.iter().enumerate() {
                e += s.e_g * c.matter[site] as f64 + s.e_w * c.matter[2 + site] as f64;
                e += s.eps_grav * c.grav[layout.local(site)] as f64;
                for (k, eps) in s.band.iter().enumerate() {
                    e += eps * c.grav[layout.band(site, k)] as f64;
                }
            }
            assert_eq!(h.get(j, j).re, e);
            for i in 0..h.dim() {
                if i != j {
                    assert_eq!(h.get(i, j), Complex64::new(0.0, 0.0));
                }
            }
        }
    }

    #[test]
    fn telegraph_single_site_two_by_two() {
        let p = TelegraphParams {
            sites: [
                SiteParams { e_g: -0.3, e_w: 0.5, v_loc: 0.2, eps_grav: 0.0, band: vec![], v_gw: 0.0 },
                SiteParams { e_g: 0.0, e_w: 0.0, v_loc: 0.0, eps_grav: 0.0, band: vec![], v_gw: 0.0 },
            ],
            hop: 0.0,
        };
        // particle restricted to site 1: g1 or w1, no gravonon quanta
        let space = ModeSpace::new(4, 2, 1).unwrap().with_sector(1).with_grav_group(0..2, 0).unwrap();
        let basis = Basis::new(space.clone()).unwrap();
        let h = build_telegraph(&p, &space).unwrap();
        let keep: Vec<usize> = basis
            .configs()
            .iter()
            .enumerate()
            .filter(|(_, c)| c.matter[0] + c.matter[2] == 1)
            .map(|(i, _)| i)
            .collect();
        assert_eq!(keep.len(), 2);
        let block = DMatrix::from_fn(2, 2, |i, j| h.get(keep[i], keep[j]).re);
        let mut e: Vec<f64> = block.symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(f64::total_cmp);
        let (mean, half) = ((-0.3 + 0.5) / 2.0, (-0.3f64 - 0.5) / 2.0);
        let r = (half * half + 0.04).sqrt();
        assert!((e[0] - (mean - r)).abs() < 1e-14 && (e[1] - (mean + r)).abs() < 1e-14);
    }

    #[test]
    fn telegraph_matches_generic_ci() {
        let p = small_telegraph(4);
        let space = p.layout().default_space().unwrap();
        let a = build_telegraph(&p, &space).unwrap();
        let b = build_generic_ci(&space, &telegraph_terms(&p)).unwrap();
        assert_eq!(a.labels(), b.labels());
        let diff = (a.entries() - b.entries()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(diff <= 1e-14);
    }

    #[test]
    fn telegraph_space_mismatch() {
        let p = small_telegraph(2);
        let wrong = ModeSpace::new(4, 3, 1).unwrap().with_sector(1);
        assert!(matches!(build_telegraph(&p, &wrong), Err(Error::BasisMismatch(_))));
    }

    #[test]
    fn generic_ci_examples() {
        let space = ModeSpace::new(2, 0, 1).unwrap().with_sector(1);
        let h = build_generic_ci(&space, &[CiTerm::new(TermKind::Matter { to: 0, from: 1 }, 0.3)]).unwrap();
        assert_eq!(h.dim(), 2);
        assert_eq!(h.get(0, 1).re, 0.3);
        assert_eq!(h.get(1, 0).re, 0.3);
        assert_eq!(h.get(0, 0).re, 0.0);
        let empty = build_generic_ci(&space, &[]).unwrap();
        assert!(empty.entries().iter().all(|z| z.norm() == 0.0));
        let bad = [CiTerm::new(TermKind::Matter { to: 0, from: 2 }, 1.0)];
        assert!(matches!(build_generic_ci(&space, &bad), Err(Error::Parameter { .. })));
        let complex_diag = [CiTerm { kind: TermKind::Matter { to: 0, from: 0 }, coefficient: Complex64::new(1.0, 1.0) }];
        assert!(build_generic_ci(&space, &complex_diag).is_err());
    }

    #[test]
    fn generic_ci_complex_hopping_is_hermitian() {
        let space = ModeSpace::new(3, 0, 2).unwrap().with_sector(2);
        let t = CiTerm { kind: TermKind::Matter { to: 0, from: 2 }, coefficient: Complex64::new(0.2, -0.7) };
        let h = build_generic_ci(&space, &[t]).unwrap();
        h.check_hermitian().unwrap();
        assert!(h.entries().iter().any(|z| z.im != 0.0));
    }

    proptest! {
        #[test]
        fn scaling_scales_spectrum(s in 0.1f64..5.0, v in -1.0f64..1.0, w in -1.0f64..1.0) {
            let p = ChooserParams::new(v, w, 6, 1.5, 0.4).with_alpha(0.1);
            let scaled = ChooserParams::new(s * v, s * w, 6, s * 1.5, s * 0.4).with_alpha(s * 0.1);
            let a = sorted_eigs(&build_chooser(&p).unwrap());
            let b = sorted_eigs(&build_chooser(&scaled).unwrap());
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((s * x - y).abs() < 1e-12 * s.max(1.0));
            }
            let c = sorted_eigs(&build_chooser(&p).unwrap().scaled(s));
            for (x, y) in c.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12 * s.max(1.0));
            }
        }

        #[test]
        fn built_matrices_are_hermitian(hop in -1.0f64..1.0, v in -1.0f64..1.0, g in -0.5f64..0.5) {
            let mut p = small_telegraph(3);
            p.hop = hop;
            p.sites[0].v_loc = v;
            p.sites[1].v_gw = g;
            let h = build_telegraph(&p, &p.layout().default_space().unwrap()).unwrap();
            prop_assert!(h.check_hermitian().is_ok());
            let m = h.entries();
            prop_assert_eq!(m.clone(), m.adjoint());
        }
    }
}
