//! Hutchinson operator, attractor chain, code words and orbit domains on random systems.

mod common;

use common::{random_ifs, random_set, rotation};
use locifs::symbolic::{check_factorial, walk_words};
use locifs::{GridSet, GridSpace, LocalIfs, Space};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const LEVEL: u8 = 6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn hutchinson_step_is_monotone(seed in any::<u64>(), sb in any::<u64>(), sc in any::<u64>()) {
        let ifs = random_ifs(seed, LEVEL);
        let b = random_set(sb, LEVEL);
        let c = b.union(&random_set(sc, LEVEL)).unwrap();
        prop_assert!(ifs.hutchinson_step(&b).is_subset(&ifs.hutchinson_step(&c)).unwrap());
    }

    #[test]
    fn attractor_chain_is_nested_and_invariant(seed in any::<u64>()) {
        let ifs = random_ifs(seed, LEVEL);
        let rep = ifs.attractor(200, 0.0).unwrap();
        prop_assert!(rep.summary.nested);
        prop_assert!(rep.summary.sizes.windows(2).all(|w| w[1] <= w[0]));
        let a = &rep.set;
        if !a.is_empty() {
            let step = ifs.hutchinson_step(a);
            prop_assert!(step.hausdorff_raw(a).unwrap() <= a.cell_diagonal());
        }
    }

    #[test]
    fn composed_images_shrink(seed in any::<u64>()) {
        let ifs = random_ifs(seed, LEVEL);
        let sp = ifs.space();
        let lambda = ifs.rate();
        let lang = ifs.code_words(5).unwrap();
        for k in 1..=5 {
            for w in lang.words(k) {
                // Each outer-covered image adds at most two diagonals before the next contraction.
                let grid: f64 = (0..k).map(|i| 2.0 * sp.slack() * lambda.powi(i as i32)).sum();
                let d = sp.diameter(&ifs.compose_image(w).unwrap());
                prop_assert!(d <= lambda.powi(k as i32) * sp.space_diameter() + grid + 1e-12, "{:?}: {}", w, d);
            }
        }
    }

    #[test]
    fn code_words_are_factorial_and_shift_consistent(seed in any::<u64>()) {
        let ifs = random_ifs(seed, LEVEL);
        let lang = ifs.code_words(6).unwrap();
        prop_assert!(check_factorial(&lang).passes);
        for k in 1..6 {
            let mut rebuilt: Vec<Vec<u8>> = lang.words(k + 1).iter().map(|w| w[1..].to_vec()).collect();
            rebuilt.extend(lang.non_extendable(k));
            rebuilt.sort();
            rebuilt.dedup();
            prop_assert_eq!(rebuilt.as_slice(), lang.words(k));
        }
    }

    #[test]
    fn orbit_domains_are_nested(seed in any::<u64>(), wseed in any::<u64>()) {
        let ifs = random_ifs(seed, LEVEL);
        let mut rng = ChaCha8Rng::seed_from_u64(wseed);
        let a: Vec<u8> = (0..12).map(|_| rng.random_range(0..ifs.len()) as u8).collect();
        for n in 1..a.len() {
            let longer = ifs.orbit_domain(&a[..n + 1]).unwrap();
            prop_assert!(longer.is_subset(&ifs.orbit_domain(&a[..n]).unwrap()).unwrap());
        }
    }

    #[test]
    fn markov_pass_gives_walk_language(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let level = 7;
        let n = rng.random_range(2..=3);
        let mut maps = Vec::new();
        let mut domains = Vec::new();
        for _ in 0..n {
            let c = [rng.random_range(0.15..0.85), rng.random_range(0.15..0.85)];
            maps.push(rotation(rng.random_range(0.05..0.2), rng.random_range(0.0..6.3), c));
            let lo = [rng.random_range(0.0..0.5), rng.random_range(0.0..0.5)];
            domains.push(GridSet::from_box(2, level, lo, [lo[0] + 0.5, lo[1] + 0.5]).unwrap());
        }
        let Ok(ifs) = LocalIfs::new(GridSpace::new(2, level).unwrap(), maps, domains) else { return Ok(()) };
        let report = ifs.markov_condition(0.03, 8).unwrap();
        prop_assume!(report.passes);
        prop_assert_eq!(ifs.code_words(10).unwrap(), walk_words(&ifs.transition_matrix(), 10).unwrap());
    }
}
