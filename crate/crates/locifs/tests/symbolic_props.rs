//! Walk languages of transition matrices.

use locifs::symbolic::{follower_count, is_k_step_sft, walk_words};
use locifs::TransitionMatrix;
use proptest::prelude::*;

#[test]
fn golden_mean_walks_are_fibonacci() {
    let m = TransitionMatrix::from_rows(vec![vec![true, true], vec![true, false]]).unwrap();
    let lang = walk_words(&m, 15).unwrap();
    for k in 3..=15 {
        assert_eq!(lang.count(k), lang.count(k - 1) + lang.count(k - 2), "k = {k}");
    }
}

fn matrix() -> impl Strategy<Value = TransitionMatrix> {
    (1usize..=4).prop_flat_map(|n| proptest::collection::vec(proptest::collection::vec(any::<bool>(), n), n))
        .prop_map(|rows| TransitionMatrix::from_rows(rows).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn walk_languages_are_one_step(m in matrix(), depth in 2usize..=12) {
        let lang = walk_words(&m, depth).unwrap();
        prop_assert!(is_k_step_sft(&lang, 1, depth).unwrap().holds);
    }

    #[test]
    fn follower_sets_bounded_by_vertex_subsets(m in matrix()) {
        let lang = walk_words(&m, 10).unwrap();
        for k in 1..6 {
            prop_assert!(follower_count(&lang, k).unwrap() <= 1 << m.size());
        }
    }
}
