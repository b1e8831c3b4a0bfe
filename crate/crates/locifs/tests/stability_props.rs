//! Upper semicontinuity on the superfractal family and graph-directed fiber equations.

mod common;

use common::rotation;
use locifs::scenarios::superfractal;
use locifs::stability::{graph_directed_embed, DirectedGraph};
use locifs::Region;
use proptest::prelude::*;

const LEVEL: u8 = 7;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn superfractal_attractors_below_stay_near(t0 in 0.05f64..0.85, k in 1usize..4) {
        let limit = superfractal(t0, LEVEL).unwrap().attractor(200, 0.0).unwrap().set;
        let grown = limit.dilate(4.0 * limit.cell_diagonal()).unwrap();
        let t = t0 - k as f64 * limit.cell_size();
        let a = superfractal(t, LEVEL).unwrap().attractor(200, 0.0).unwrap().set;
        prop_assert!(a.is_subset(&grown).unwrap(), "t = {}", t);
    }

    #[test]
    fn fiber_equations_hold(n in 2usize..4, seed in proptest::collection::vec((0.25f64..0.5, 0.0f64..6.3, 0.36f64..0.64, 0.36f64..0.64), 4)) {
        let edges: Vec<(usize, usize)> = (0..n).map(|v| (v, (v + 1) % n)).chain(std::iter::once((0, 0))).collect();
        let graph = DirectedGraph::new(n, edges.clone()).unwrap();
        let maps: Vec<_> = edges.iter().zip(seed.iter().cycle()).map(|(_, &(r, th, cx, cy))| rotation(r, th, [cx, cy])).collect();
        let fibers = vec![Region::Full; n];
        let gd = graph_directed_embed(&graph, &fibers, &maps, LEVEL + 1, 0.1).unwrap();
        let a = gd.ifs.attractor(200, 0.0).unwrap().set;
        let tol = 3.0 * a.cell_diagonal();
        for e in gd.fiber_equation_errors(&a) {
            prop_assert!(e <= tol, "{} > {}", e, tol);
        }
        prop_assert_eq!(gd.ifs.transition_matrix(), graph.composability().unwrap());
    }
}

/// At the height `√3/4` of `f_3` applied to the base, domains shrinking from above keep
/// the attractors close, while just below it the attractor drops a whole piece.
#[test]
fn superfractal_critical_height() {
    let t0 = 3f64.sqrt() / 4.0;
    let limit = superfractal(t0, 9).unwrap().attractor(200, 0.0).unwrap().set;
    let h = limit.cell_size();
    let grown = limit.dilate(4.0 * limit.cell_diagonal()).unwrap();
    for t in [t0 + h, t0 + h / 2.0, t0 + h / 4.0] {
        let a = superfractal(t, 9).unwrap().attractor(200, 0.0).unwrap().set;
        assert!(a.is_subset(&grown).unwrap(), "t = {t}");
    }
    let below = superfractal(t0 - 2.0 * h, 9).unwrap().attractor(200, 0.0).unwrap().set;
    let (gap, _) = limit.directed_distance(&below).unwrap();
    assert!(gap > 0.05, "{gap}");
}
