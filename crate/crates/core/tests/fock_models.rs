use proptest::prelude::*;

use emerge_core::fock::{apply_ladder, apply_product, enumerate_configs, inner_product, Basis, Ladder, LadderOutcome, Mode, ModeSpace, OccupationConfig};
use emerge_core::models::{build_generic_ci, build_telegraph, telegraph_terms};
use emerge_core::propagator;
use emerge_core::telegraph;

fn space_strategy() -> impl Strategy<Value = ModeSpace> {
    (0usize..4, 0usize..4, 1u32..4, prop::option::of(0u32..4))
        .prop_filter("at least one mode", |(m, g, _, _)| m + g > 0)
        .prop_map(|(m, g, n_max, sector)| {
            let s = ModeSpace::new(m, g, n_max).unwrap();
            match sector {
                Some(q) => s.with_sector(q),
                None => s,
            }
        })
}

fn modes(space: &ModeSpace) -> Vec<Mode> {
    (0..space.n_matter()).map(Mode::Matter).chain((0..space.n_grav()).map(Mode::Grav)).collect()
}

/// Every occupation vector over the full hypercube that the space accepts.
fn brute_force(space: &ModeSpace) -> Vec<OccupationConfig> {
    let n = space.n_matter() + space.n_grav();
    let base = space.n_max() + 1;
    let mut out = Vec::new();
    let mut occ = vec![0u32; n];
    loop {
        let c = OccupationConfig::new(occ[..space.n_matter()].to_vec(), occ[space.n_matter()..].to_vec());
        if space.contains(&c) {
            out.push(c);
        }
        let mut p = n;
        loop {
            if p == 0 {
                out.sort();
                return out;
            }
            p -= 1;
            occ[p] += 1;
            if occ[p] < base {
                break;
            }
            occ[p] = 0;
        }
    }
}

proptest! {
    #[test]
    fn enumeration_matches_brute_force(space in space_strategy()) {
        let configs = enumerate_configs(&space).unwrap();
        prop_assert!(configs.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(configs, brute_force(&space));
    }

    #[test]
    fn commutator_below_truncation(space in space_strategy()) {
        for c in enumerate_configs(&space).unwrap() {
            for mode in modes(&space) {
                if c.occupation(mode) >= space.n_max() {
                    continue;
                }
                let up_down = apply_product(&space, &c, &[(mode, Ladder::Lower), (mode, Ladder::Raise)]).unwrap();
                let down_up = apply_product(&space, &c, &[(mode, Ladder::Raise), (mode, Ladder::Lower)]).unwrap();
                let a = match up_down {
                    LadderOutcome::State(back, a) => {
                        prop_assert_eq!(&back, &c);
                        a
                    }
                    other => panic!("b b+ left the space: {other:?}"),
                };
                let b = match down_up {
                    LadderOutcome::State(back, b) => {
                        prop_assert_eq!(&back, &c);
                        b
                    }
                    LadderOutcome::Zero => 0.0,
                    LadderOutcome::OutOfSpace => panic!("b+ b left the space"),
                };
                prop_assert!((a - b - 1.0).abs() <= 4.0 * f64::EPSILON);
            }
        }
    }

    #[test]
    fn configurations_are_orthonormal(space in space_strategy()) {
        let configs = enumerate_configs(&space).unwrap();
        for (i, a) in configs.iter().enumerate().take(12) {
            for (j, b) in configs.iter().enumerate().take(12) {
                prop_assert_eq!(inner_product(a, b).unwrap(), u8::from(i == j));
            }
        }
    }

    #[test]
    fn raising_then_lowering_restores(space in space_strategy(), pick in 0usize..64) {
        let configs = enumerate_configs(&space).unwrap();
        prop_assume!(!configs.is_empty());
        let c = &configs[pick % configs.len()];
        for mode in modes(&space) {
            match apply_ladder(&space, c, mode, Ladder::Raise).unwrap() {
                LadderOutcome::State(up, a) => {
                    prop_assert_eq!(up.occupation(mode), c.occupation(mode) + 1);
                    prop_assert_eq!(a, f64::from(c.occupation(mode) + 1).sqrt());
                }
                LadderOutcome::OutOfSpace => prop_assert_eq!(c.occupation(mode), space.n_max()),
                LadderOutcome::Zero => panic!("raising never annihilates"),
            }
        }
    }
}

#[test]
fn basis_lookup_round_trips() {
    let space = ModeSpace::new(3, 2, 2).unwrap().with_grav_group(0..2, 1).unwrap();
    let basis = Basis::new(space).unwrap();
    for (i, c) in basis.configs().iter().enumerate() {
        assert_eq!(basis.index_of(c), Some(i));
    }
    assert_eq!(basis.len(), 27 * 2);
}

#[test]
fn telegraph_builder_agrees_with_generic_terms() {
    let mut p = telegraph::reference_params();
    for s in &mut p.sites {
        s.band = telegraph::flat_band(0.1, 0.6, 4);
    }
    let space = p.layout().default_space().unwrap();
    let direct = build_telegraph(&p, &space).unwrap();
    let generic = build_generic_ci(&space, &telegraph_terms(&p)).unwrap();
    assert_eq!(direct.dim(), generic.dim());
    assert!((direct.entries() - generic.entries()).camax() <= 1e-14);
}

#[test]
fn reference_run_is_reproducible() {
    let p = telegraph::reference_params();
    let layout = p.layout();
    let space = layout.default_space().unwrap();
    let times = propagator::linear_grid(0.0, telegraph::recurrence_time(&p).unwrap(), 64);
    let init = telegraph::initial_config(&layout, 0);
    let a = telegraph::simulate(&p, &space, &init, &times).unwrap();
    let b = telegraph::simulate(&p, &space, &init, &times).unwrap();
    assert_eq!(a.series, b.series);
    assert!(a.series.channel("norm").unwrap().iter().all(|x| (x - 1.0).abs() < 1e-10));
}
