//! Truncated bosonic occupation-number basis.
//!
//! A configuration assigns an occupation number to every matter mode and every
//! gravonon mode. Mode phase factors are taken as unity, so a configuration is
//! fully described by its occupation lists and the scalar product between two
//! configurations is a product of Kronecker deltas.

use std::fmt;
use std::ops::Range;

use crate::error::{Error, Result};

/// Default cap on the number of enumerated configurations.
pub const DEFAULT_BASIS_CAP: usize = 200_000;

/// A constraint fixing the total number of quanta in a contiguous block of
/// gravonon modes (for instance all modes attached to one adsorption site).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuantaGroup {
    pub modes: Range<usize>,
    pub quanta: u32,
}

/// Shape of a truncated Fock space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ModeSpace {
    n_matter: usize,
    n_grav: usize,
    n_max: u32,
    sector: Option<u32>,
    grav_groups: Vec<QuantaGroup>,
    cap: usize,
}

impl ModeSpace {
    pub fn new(n_matter: usize, n_grav: usize, n_max: u32) -> Result<Self> {
        if n_max < 1 {
            return Err(Error::param("n_max", "maximum occupation must be at least 1"));
        }
        Ok(ModeSpace {
            n_matter,
            n_grav,
            n_max,
            sector: None,
            grav_groups: Vec::new(),
            cap: DEFAULT_BASIS_CAP,
        })
    }

    /// Restrict to configurations carrying exactly `quanta` matter quanta.
    pub fn with_sector(mut self, quanta: u32) -> Self {
        self.sector = Some(quanta);
        self
    }

    /// Require exactly `quanta` quanta among the gravonon modes in `modes`.
    /// Groups may not overlap.
    pub fn with_grav_group(mut self, modes: Range<usize>, quanta: u32) -> Result<Self> {
        if modes.start > modes.end || modes.end > self.n_grav {
            return Err(Error::param(
                "grav_group",
                format!("mode range {modes:?} outside 0..{}", self.n_grav),
            ));
        }
        if self
            .grav_groups
            .iter()
            .any(|g| g.modes.start < modes.end && modes.start < g.modes.end)
        {
            return Err(Error::param("grav_group", format!("range {modes:?} overlaps an existing group")));
        }
        self.grav_groups.push(QuantaGroup { modes, quanta });
        Ok(self)
    }

    pub fn with_cap(mut self, cap: usize) -> Self {
        self.cap = cap;
        self
    }

    pub fn n_matter(&self) -> usize {
        self.n_matter
    }

    pub fn n_grav(&self) -> usize {
        self.n_grav
    }

    pub fn n_max(&self) -> u32 {
        self.n_max
    }

    pub fn sector(&self) -> Option<u32> {
        self.sector
    }

    pub fn grav_groups(&self) -> &[QuantaGroup] {
        &self.grav_groups
    }

    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn vacuum(&self) -> OccupationConfig {
        OccupationConfig {
            matter: vec![0; self.n_matter],
            grav: vec![0; self.n_grav],
        }
    }

    /// Checks that `c` has this space's shape and truncation. Sector and
    /// group constraints are not checked here.
    pub fn check(&self, c: &OccupationConfig) -> Result<()> {
        if c.matter.len() != self.n_matter || c.grav.len() != self.n_grav {
            return Err(Error::Dimension(format!(
                "config has {}+{} modes, space has {}+{}",
                c.matter.len(),
                c.grav.len(),
                self.n_matter,
                self.n_grav
            )));
        }
        if c.matter.iter().chain(&c.grav).any(|&n| n > self.n_max) {
            return Err(Error::param("occupation", format!("exceeds n_max = {}", self.n_max)));
        }
        Ok(())
    }

    /// True if `c` satisfies every constraint of the space.
    pub fn contains(&self, c: &OccupationConfig) -> bool {
        if self.check(c).is_err() {
            return false;
        }
        if let Some(s) = self.sector {
            if c.matter.iter().sum::<u32>() != s {
                return false;
            }
        }
        self.grav_groups
            .iter()
            .all(|g| c.grav[g.modes.clone()].iter().sum::<u32>() == g.quanta)
    }
}

/// One field configuration: occupation numbers over matter and gravonon modes.
///
/// The derived ordering is lexicographic on `(matter, grav)`, which is the
/// basis order used throughout.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OccupationConfig {
    pub matter: Vec<u32>,
    pub grav: Vec<u32>,
}

impl OccupationConfig {
    pub fn new(matter: Vec<u32>, grav: Vec<u32>) -> Self {
        OccupationConfig { matter, grav }
    }

    pub fn occupation(&self, mode: Mode) -> u32 {
        match mode {
            Mode::Matter(i) => self.matter[i],
            Mode::Grav(i) => self.grav[i],
        }
    }

    fn occupation_mut(&mut self, mode: Mode) -> &mut u32 {
        match mode {
            Mode::Matter(i) => &mut self.matter[i],
            Mode::Grav(i) => &mut self.grav[i],
        }
    }

    pub fn total_matter(&self) -> u32 {
        self.matter.iter().sum()
    }

    pub fn total_grav(&self) -> u32 {
        self.grav.iter().sum()
    }
}

impl fmt::Display for OccupationConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let wide = self.matter.iter().chain(&self.grav).any(|&n| n > 9);
        let write_part = |f: &mut fmt::Formatter<'_>, occ: &[u32]| -> fmt::Result {
            for (i, n) in occ.iter().enumerate() {
                if wide && i > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{n}")?;
            }
            Ok(())
        };
        write_part(f, &self.matter)?;
        write!(f, "|")?;
        write_part(f, &self.grav)
    }
}

/// A single bosonic mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Matter(usize),
    Grav(usize),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ladder {
    Raise,
    Lower,
}

/// Result of a ladder operator acting on a configuration.
#[derive(Debug, Clone, PartialEq)]
pub enum LadderOutcome {
    State(OccupationConfig, f64),
    /// Lowering an empty mode annihilates the state.
    Zero,
    /// Raising would exceed `n_max`; the caller decides whether to truncate.
    OutOfSpace,
}

/// Enumerates every configuration of `space` in lexicographic order.
pub fn enumerate_configs(space: &ModeSpace) -> Result<Vec<OccupationConfig>> {
    let n_modes = space.n_matter + space.n_grav;
    let mut group_of = vec![None; n_modes];
    for (g, grp) in space.grav_groups.iter().enumerate() {
        for m in grp.modes.clone() {
            group_of[space.n_matter + m] = Some(g);
        }
    }
    // modes of each group (and matter modes) still to be visited after position p
    let mut matter_after = vec![0u32; n_modes + 1];
    let mut group_after = vec![vec![0u32; space.grav_groups.len()]; n_modes + 1];
    for p in (0..n_modes).rev() {
        matter_after[p] = matter_after[p + 1] + u32::from(p < space.n_matter);
        group_after[p] = group_after[p + 1].clone();
        if let Some(g) = group_of[p] {
            group_after[p][g] += 1;
        }
    }

    let mut walker = Walker {
        space,
        group_of: &group_of,
        matter_after: &matter_after,
        group_after: &group_after,
        occ: vec![0; n_modes],
        group_sums: vec![0; space.grav_groups.len()],
        matter_sum: 0,
        out: Vec::new(),
    };
    walker.descend(0)?;
    Ok(walker.out)
}

struct Walker<'a> {
    space: &'a ModeSpace,
    group_of: &'a [Option<usize>],
    matter_after: &'a [u32],
    group_after: &'a [Vec<u32>],
    occ: Vec<u32>,
    group_sums: Vec<u32>,
    matter_sum: u32,
    out: Vec<OccupationConfig>,
}

impl Walker<'_> {
    fn feasible(&self, p: usize) -> bool {
        let n_max = self.space.n_max;
        if let Some(s) = self.space.sector {
            if self.matter_sum > s || s - self.matter_sum > self.matter_after[p] * n_max {
                return false;
            }
        }
        self.space.grav_groups.iter().enumerate().all(|(g, grp)| {
            let have = self.group_sums[g];
            have <= grp.quanta && grp.quanta - have <= self.group_after[p][g] * n_max
        })
    }

    fn descend(&mut self, p: usize) -> Result<()> {
        if !self.feasible(p) {
            return Ok(());
        }
        if p == self.occ.len() {
            if self.out.len() == self.space.cap {
                return Err(Error::SizeLimit { what: "Fock basis", cap: self.space.cap });
            }
            let (m, g) = self.occ.split_at(self.space.n_matter);
            self.out.push(OccupationConfig::new(m.to_vec(), g.to_vec()));
            return Ok(());
        }
        let is_matter = p < self.space.n_matter;
        for n in 0..=self.space.n_max {
            self.occ[p] = n;
            if is_matter {
                self.matter_sum += n;
            } else if let Some(g) = self.group_of[p] {
                self.group_sums[g] += n;
            }
            let r = self.descend(p + 1);
            if is_matter {
                self.matter_sum -= n;
            } else if let Some(g) = self.group_of[p] {
                self.group_sums[g] -= n;
            }
            r?;
        }
        self.occ[p] = 0;
        Ok(())
    }
}

/// Scalar product of two configurations: 1 if identical, else 0.
pub fn inner_product(c1: &OccupationConfig, c2: &OccupationConfig) -> Result<u8> {
    if c1.matter.len() != c2.matter.len() || c1.grav.len() != c2.grav.len() {
        return Err(Error::Dimension(format!(
            "configs with {}+{} and {}+{} modes",
            c1.matter.len(),
            c1.grav.len(),
            c2.matter.len(),
            c2.grav.len()
        )));
    }
    Ok(u8::from(c1 == c2))
}

fn check_mode(space: &ModeSpace, mode: Mode) -> Result<()> {
    let (i, len, field) = match mode {
        Mode::Matter(i) => (i, space.n_matter, "matter"),
        Mode::Grav(i) => (i, space.n_grav, "gravonon"),
    };
    if i >= len {
        return Err(Error::param("mode", format!("{field} mode {i} out of range 0..{len}")));
    }
    Ok(())
}

/// Applies a single creation or annihilation operator.
pub fn apply_ladder(
    space: &ModeSpace,
    c: &OccupationConfig,
    mode: Mode,
    kind: Ladder,
) -> Result<LadderOutcome> {
    check_mode(space, mode)?;
    space.check(c)?;
    Ok(ladder_unchecked(space.n_max, c.clone(), mode, kind))
}

fn ladder_unchecked(n_max: u32, mut c: OccupationConfig, mode: Mode, kind: Ladder) -> LadderOutcome {
    let n = c.occupation(mode);
    match kind {
        Ladder::Raise if n >= n_max => LadderOutcome::OutOfSpace,
        Ladder::Raise => {
            *c.occupation_mut(mode) = n + 1;
            LadderOutcome::State(c, f64::from(n + 1).sqrt())
        }
        Ladder::Lower if n == 0 => LadderOutcome::Zero,
        Ladder::Lower => {
            *c.occupation_mut(mode) = n - 1;
            LadderOutcome::State(c, f64::from(n).sqrt())
        }
    }
}

/// Applies an operator product as written, i.e. the rightmost factor acts
/// first. An out-of-space intermediate is reported as [`LadderOutcome::OutOfSpace`].
pub fn apply_product(
    space: &ModeSpace,
    c: &OccupationConfig,
    ops: &[(Mode, Ladder)],
) -> Result<LadderOutcome> {
    space.check(c)?;
    for &(mode, _) in ops {
        check_mode(space, mode)?;
    }
    let mut state = c.clone();
    let mut amp = 1.0;
    for &(mode, kind) in ops.iter().rev() {
        match ladder_unchecked(space.n_max, state, mode, kind) {
            LadderOutcome::State(next, a) => {
                state = next;
                amp *= a;
            }
            other => return Ok(other),
        }
    }
    Ok(LadderOutcome::State(state, amp))
}

/// An enumerated basis with fast index lookup.
#[derive(Debug, Clone)]
pub struct Basis {
    space: ModeSpace,
    configs: Vec<OccupationConfig>,
}

impl Basis {
    pub fn new(space: ModeSpace) -> Result<Self> {
        let configs = enumerate_configs(&space)?;
        Ok(Basis { space, configs })
    }

    pub fn space(&self) -> &ModeSpace {
        &self.space
    }

    pub fn configs(&self) -> &[OccupationConfig] {
        &self.configs
    }

    pub fn len(&self) -> usize {
        self.configs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.configs.is_empty()
    }

    pub fn index_of(&self, c: &OccupationConfig) -> Option<usize> {
        self.configs.binary_search(c).ok()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_force(space: &ModeSpace) -> Vec<OccupationConfig> {
        let n_modes = space.n_matter() + space.n_grav();
        let base = space.n_max() as usize + 1;
        let total = base.pow(n_modes as u32);
        let mut out = Vec::new();
        for code in 0..total {
            let mut digits = vec![0u32; n_modes];
            let mut x = code;
            for d in digits.iter_mut().rev() {
                *d = (x % base) as u32;
                x /= base;
            }
            let (m, g) = digits.split_at(space.n_matter());
            let c = OccupationConfig::new(m.to_vec(), g.to_vec());
            if space.contains(&c) {
                out.push(c);
            }
        }
        out
    }

    #[test]
    fn two_modes_single_occupancy() {
        let space = ModeSpace::new(2, 0, 1).unwrap();
        let labels: Vec<String> = enumerate_configs(&space)
            .unwrap()
            .iter()
            .map(|c| c.matter.iter().map(|n| n.to_string()).collect())
            .collect();
        assert_eq!(labels, ["00", "01", "10", "11"]);
    }

    #[test]
    fn empty_space_has_vacuum_only() {
        let space = ModeSpace::new(0, 0, 3).unwrap();
        let configs = enumerate_configs(&space).unwrap();
        assert_eq!(configs.len(), 1);
        assert!(configs[0].matter.is_empty() && configs[0].grav.is_empty());
    }

    #[test]
    fn single_particle_sector_matches_filter() {
        let space = ModeSpace::new(4, 0, 1).unwrap().with_sector(1);
        let configs = enumerate_configs(&space).unwrap();
        assert_eq!(configs, brute_force(&space));
        assert_eq!(configs.len(), 4);
    }

    #[test]
    fn grouped_gravonons_match_filter() {
        let space = ModeSpace::new(3, 5, 2)
            .unwrap()
            .with_sector(2)
            .with_grav_group(0..2, 1)
            .unwrap()
            .with_grav_group(2..5, 2)
            .unwrap();
        assert_eq!(enumerate_configs(&space).unwrap(), brute_force(&space));
    }

    #[test]
    fn zero_n_max_rejected() {
        assert!(matches!(ModeSpace::new(1, 1, 0), Err(Error::Parameter { .. })));
    }

    #[test]
    fn overlapping_groups_rejected() {
        let space = ModeSpace::new(0, 4, 1).unwrap().with_grav_group(0..3, 1).unwrap();
        assert!(space.with_grav_group(2..4, 1).is_err());
    }

    #[test]
    fn cap_is_reported() {
        let space = ModeSpace::new(10, 0, 1).unwrap().with_cap(100);
        match enumerate_configs(&space) {
            Err(Error::SizeLimit { cap, .. }) => assert_eq!(cap, 100),
            other => panic!("expected size limit, got {other:?}"),
        }
        // exactly at the cap is fine
        let space = ModeSpace::new(2, 0, 1).unwrap().with_cap(4);
        assert_eq!(enumerate_configs(&space).unwrap().len(), 4);
    }

    #[test]
    fn inner_product_cases() {
        let a = OccupationConfig::new(vec![1, 0], vec![0, 1]);
        let b = OccupationConfig::new(vec![1, 0], vec![1, 1]);
        let c = OccupationConfig::new(vec![0, 1], vec![0, 1]);
        assert_eq!(inner_product(&a, &a).unwrap(), 1);
        assert_eq!(inner_product(&a, &b).unwrap(), 0);
        assert_eq!(inner_product(&a, &c).unwrap(), 0);
        let short = OccupationConfig::new(vec![1], vec![0, 1]);
        assert!(matches!(inner_product(&a, &short), Err(Error::Dimension(_))));
    }

    #[test]
    fn ladder_basics() {
        let space = ModeSpace::new(1, 1, 4).unwrap();
        let vac = space.vacuum();
        assert_eq!(
            apply_ladder(&space, &vac, Mode::Matter(0), Ladder::Raise).unwrap(),
            LadderOutcome::State(OccupationConfig::new(vec![1], vec![0]), 1.0)
        );
        assert_eq!(
            apply_ladder(&space, &vac, Mode::Grav(0), Ladder::Lower).unwrap(),
            LadderOutcome::Zero
        );
        let full = OccupationConfig::new(vec![4], vec![0]);
        assert_eq!(
            apply_ladder(&space, &full, Mode::Matter(0), Ladder::Raise).unwrap(),
            LadderOutcome::OutOfSpace
        );
        assert!(apply_ladder(&space, &vac, Mode::Grav(1), Ladder::Raise).is_err());
    }

    #[test]
    fn raise_lower_on_three() {
        let space = ModeSpace::new(0, 1, 4).unwrap();
        let c = OccupationConfig::new(vec![], vec![3]);
        let g = Mode::Grav(0);
        let bbd = apply_product(&space, &c, &[(g, Ladder::Lower), (g, Ladder::Raise)]).unwrap();
        let bdb = apply_product(&space, &c, &[(g, Ladder::Raise), (g, Ladder::Lower)]).unwrap();
        let (LadderOutcome::State(c1, a1), LadderOutcome::State(c2, a2)) = (bbd, bdb) else {
            panic!("both orderings stay in space");
        };
        assert_eq!(c1, c);
        assert_eq!(c2, c);
        assert!((a1 - 4.0).abs() < 1e-15);
        assert!((a2 - 3.0).abs() < 1e-15);
    }

    #[test]
    fn display_is_compact() {
        let c = OccupationConfig::new(vec![1, 0], vec![0, 2]);
        assert_eq!(c.to_string(), "10|02");
        let w = OccupationConfig::new(vec![12], vec![3]);
        assert_eq!(w.to_string(), "12|3");
    }
}
