//! Tracking bound, witness-set nesting, Γ monotonicity and pseudo-orbit transfer.

mod common;

use common::random_ifs;
use locifs::scenarios::markov2;
use locifs::shadowing::{
    gamma_zero_set, l1_bound, make_pseudo_orbit, random_orbit_word, shadow_search, snap_pseudo_orbit, tracking_distances,
    witness_sets,
};
use locifs::stability::{d_distance_upper, perturb, PerturbationSpec};
use locifs::Space;
use proptest::prelude::*;

const LEVEL: u8 = 6;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tracking_bound_holds(seed in any::<u64>(), m in 2i32..8) {
        let ifs = random_ifs(seed, LEVEL);
        let a = ifs.attractor(200, 0.0).unwrap().set;
        prop_assume!(!a.is_empty());
        let Some((x, word)) = random_orbit_word(&ifs, &a, 16, seed) else { return Ok(()) };
        let delta = 0.5f64.powi(m);
        let Ok(po) = make_pseudo_orbit(&ifs, &a, &word, delta, seed) else { return Ok(()) };
        prop_assume!(po.verified);
        let sp = ifs.space();
        let dist = tracking_distances(&ifs, &po, &x).expect("true orbit stays in the domains");
        for (k, &d) in dist.iter().enumerate() {
            prop_assert!(d <= l1_bound(delta, ifs.rate(), k, dist[0]).unwrap() + sp.slack());
        }
    }

    #[test]
    fn witness_sets_nest_when_shadowed(seed in any::<u64>()) {
        let ifs = random_ifs(seed, LEVEL);
        let a = ifs.attractor(200, 0.0).unwrap().set;
        prop_assume!(!a.is_empty());
        let Some((_, word)) = random_orbit_word(&ifs, &a, 10, seed) else { return Ok(()) };
        let Ok(po) = make_pseudo_orbit(&ifs, &a, &word, 0.02, seed) else { return Ok(()) };
        let eps = 0.2;
        let all_found = (1..=po.points.len()).all(|n| shadow_search(&ifs, &po.prefix(n), eps).unwrap().is_found());
        prop_assume!(all_found);
        let sets = witness_sets(&ifs, &po, eps);
        for w in sets.windows(2) {
            prop_assert!(!w[1].is_empty());
            prop_assert!(w[1].is_subset(&w[0]).unwrap());
        }
    }

    #[test]
    fn gamma_monotone_in_delta_and_nested_in_length(seed in any::<u64>(), m in 3i32..8) {
        let ifs = random_ifs(seed, LEVEL);
        let a = ifs.attractor(200, 0.0).unwrap().set;
        prop_assume!(!a.is_empty());
        let Some((_, word)) = random_orbit_word(&ifs, &a, 8, seed) else { return Ok(()) };
        let small = 0.5f64.powi(m + 1);
        let large = 0.5f64.powi(m);
        let g_small = gamma_zero_set(&ifs, &word, small).unwrap();
        prop_assert!(g_small.is_subset(&gamma_zero_set(&ifs, &word, large).unwrap()).unwrap());
        for n in 1..word.len() {
            let longer = gamma_zero_set(&ifs, &word[..n + 1], large).unwrap();
            prop_assert!(longer.is_subset(&gamma_zero_set(&ifs, &word[..n], large).unwrap()).unwrap());
        }
    }

    #[test]
    fn pseudo_orbits_transfer_to_nearby_system(seed in 0u64..10_000) {
        let r = markov2(7).unwrap();
        let delta = 0.05;
        let spec = PerturbationSpec::random(r.len(), 2, 0.2 * delta, seed);
        let (q, pairings) = perturb(&r, &spec).unwrap();
        let bound = d_distance_upper(&r, &q, Some(&pairings)).unwrap();
        prop_assume!(bound.total < delta);
        let a = q.attractor(200, 0.0).unwrap().set;
        let Some((_, word)) = random_orbit_word(&q, &a, 12, seed) else { return Ok(()) };
        let Ok(po) = make_pseudo_orbit(&q, &a, &word, delta, seed) else { return Ok(()) };
        prop_assume!(po.verified);
        let snapped = snap_pseudo_orbit(&r, &po, 5.0 * delta).unwrap();
        prop_assert!(snapped.verified);
        let sp = r.space();
        for (p, s) in po.points.iter().zip(&snapped.points) {
            prop_assert!(sp.distance(p, s) < delta);
        }
    }
}
