//! Random systems and sets shared by the property suites.

#![allow(dead_code)]

use locifs::{AffineContraction, GridSet, GridSpace, LocalIfs};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Rotation-scaling map sending the unit square into `[0,1]²` around `center`.
pub fn rotation(r: f64, theta: f64, center: [f64; 2]) -> AffineContraction {
    let l = [[r * theta.cos(), -r * theta.sin()], [r * theta.sin(), r * theta.cos()]];
    let t = [center[0] - 0.5 * (l[0][0] + l[0][1]), center[1] - 0.5 * (l[1][0] + l[1][1])];
    AffineContraction::new(2, l, t, r).expect("contraction")
}

/// 2 or 3 rotation-scalings with ratios in `[0.2, 0.5)` on random boxes containing the
/// middle of the square.
pub fn random_ifs(seed: u64, level: u8) -> LocalIfs<GridSpace> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.random_range(2..=3);
    let mut maps = Vec::new();
    let mut domains = Vec::new();
    for _ in 0..n {
        let r = rng.random_range(0.2..0.5);
        let c = [rng.random_range(0.36..0.64), rng.random_range(0.36..0.64)];
        maps.push(rotation(r, rng.random_range(0.0..std::f64::consts::TAU), c));
        let lo = [rng.random_range(0.0..0.3), rng.random_range(0.0..0.3)];
        let hi = [rng.random_range(0.7..1.0), rng.random_range(0.7..1.0)];
        domains.push(GridSet::from_box(2, level, lo, hi).expect("box"));
    }
    LocalIfs::new(GridSpace::new(2, level).expect("level"), maps, domains).expect("system")
}

/// Union of up to four random boxes.
pub fn random_set(seed: u64, level: u8) -> GridSet {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut s = GridSet::empty(2, level).expect("level");
    for _ in 0..rng.random_range(1..=4) {
        let lo: [f64; 2] = [rng.random_range(0.0..0.9), rng.random_range(0.0..0.9)];
        let hi = [lo[0] + rng.random_range(0.0..0.4), lo[1] + rng.random_range(0.0..0.4)];
        s = s.union(&GridSet::from_box(2, level, lo, [hi[0].min(1.0), hi[1].min(1.0)]).expect("box")).expect("same grid");
    }
    s
}
