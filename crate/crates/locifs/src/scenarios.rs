//! Builtin systems.
//!
//! | name | backend | system |
//! |------|---------|--------|
//! | `superfractal` | grid 2D | Sierpinski maps, third domain cut at height `β` |
//! | `nonsemicont` | grid 2D | three quarter-scale maps plus a map toward `(¾,¾)` with domain `[1−t,1]²` |
//! | `exshift2` | sequences over `{0,1,2}` | two prepend maps and the window-sum map |
//! | `beta-golden`, `beta-sparse` | grid 1D | β-derived systems |
//! | `gd-2cycle` | grid 2D | two-vertex cycle graph embedded as a local IFS |
//! | `markov2` | grid 2D | two maps satisfying the Markov criterion |
//! | `global2` | grid 2D | two maps with full domains and separated images |

use crate::beta::{self, BetaError, BetaSystem};
use crate::geometry::{AffineContraction, GeometryError, GridSet, Region};
use crate::ifs::{IfsError, LocalIfs};
use crate::shadowing::{gap_at, GapCurve, PseudoOrbit, ShadowError};
use crate::space::{GridSpace, SeqSpace};
use crate::stability::{graph_directed_embed, DirectedGraph, GdEmbedding, StabilityError};
use crate::symbolic::cylinder::{CylinderSet, SeqPoint, SymbolicMap};

pub const BUILTINS: &[&str] = &["superfractal", "nonsemicont", "exshift2", "beta-golden", "beta-sparse", "gd-2cycle", "markov2", "global2"];

/// Default grid level of 2D builtins.
pub const DEFAULT_LEVEL: u8 = 9;
/// Default grid level of the β-derived systems on `[0,1]`.
pub const DEFAULT_LEVEL_1D: u8 = 16;
/// Default cylinder window of `exshift2`.
pub const DEFAULT_WINDOW: u8 = 16;

/// The contraction ratio `c` of the map toward `(¾,¾)` in `nonsemicont`.
pub const NONSEMICONT_C: f64 = 0.8;
/// Margin with which `markov2` satisfies the Markov criterion.
pub const MARKOV2_ZETA: f64 = 0.08;
/// Gap between the vertex copies of `gd-2cycle`.
pub const GD_GAP: f64 = 0.1;
/// Gap list of `beta-sparse`.
pub const SPARSE_GAPS: [u32; 5] = [1, 2, 3, 4, 5];

fn grid(level: u8) -> Result<GridSpace, IfsError> {
    Ok(GridSpace::new(2, level)?)
}

/// Vertices of the equilateral triangle with base `[0,1] × {0}`.
pub fn triangle() -> Vec<[f64; 2]> {
    vec![[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]]
}

/// Sierpinski maps `½x`, `½(x + (1,0))`, `½(x + (½, √3/2))`.
pub fn sierpinski_maps() -> Vec<AffineContraction> {
    let h = 3f64.sqrt() / 2.0;
    [[0.0, 0.0], [0.5, 0.0], [0.25, h / 2.0]]
        .into_iter()
        .map(|t| AffineContraction::similarity(0.5, t).expect("valid similarity"))
        .collect()
}

/// The superfractal family: `X_1 = X_2 = X` (the triangle), `X_3 = X ∩ {y ≤ β}`.
pub fn superfractal(beta: f64, level: u8) -> Result<LocalIfs<GridSpace>, IfsError> {
    let tri = Region::Polygon(triangle());
    let x = tri.rasterize(2, level)?;
    let x3 = tri.clip_below(1, beta).rasterize(2, level)?;
    LocalIfs::new(grid(level)?, sierpinski_maps(), vec![x.clone(), x, x3])
}

/// The four maps of `nonsemicont`.
pub fn nonsemicont_maps() -> Vec<AffineContraction> {
    let q = |t: [f64; 2]| AffineContraction::similarity(0.25, t).expect("valid similarity");
    let c = NONSEMICONT_C;
    vec![
        q([0.25, 0.25]),
        q([0.0, 0.25]),
        q([0.25, 0.0]),
        AffineContraction::similarity(1.0 - c, [0.75 * c, 0.75 * c]).expect("valid similarity"),
    ]
}

/// `X_1 = X_2 = X_3 = [0, ½]²`, `X_4 = [1−t, 1]²`.
pub fn nonsemicont(t: f64, level: u8) -> Result<LocalIfs<GridSpace>, IfsError> {
    let low = GridSet::from_box(2, level, [0.0, 0.0], [0.5, 0.5])?;
    let corner = GridSet::from_box(2, level, [1.0 - t, 1.0 - t], [1.0, 1.0])?;
    LocalIfs::new(grid(level)?, nonsemicont_maps(), vec![low.clone(), low.clone(), low, corner])
}

/// `X_1 = [0,1]²`, `X_2 = [0,½] × [0,1]`, `f_1 = 0.3x + (0.1, 0.35)`, `f_2 = 0.3x + (0.6, 0.35)`.
pub fn markov2(level: u8) -> Result<LocalIfs<GridSpace>, IfsError> {
    let f1 = AffineContraction::similarity(0.3, [0.1, 0.35])?;
    let f2 = AffineContraction::similarity(0.3, [0.6, 0.35])?;
    let x1 = GridSet::full(2, level)?;
    let x2 = GridSet::from_box(2, level, [0.0, 0.0], [0.5, 1.0])?;
    LocalIfs::new(grid(level)?, vec![f1, f2], vec![x1, x2])
}

/// Two maps of ratio 0.4 on the full square with images `0.1` apart.
pub fn global2(level: u8) -> Result<LocalIfs<GridSpace>, IfsError> {
    let f1 = AffineContraction::similarity(0.4, [0.05, 0.3])?;
    let f2 = AffineContraction::similarity(0.4, [0.55, 0.3])?;
    let full = GridSet::full(2, level)?;
    LocalIfs::new(grid(level)?, vec![f1, f2], vec![full.clone(), full])
}

/// `f_0 = 0·x`, `f_1 = 1·x` (prepend) and `f_2(x) = (0, 0, x_1+x_2, x_2+x_3, …)`, all on `{0,1}^ℕ`.
pub fn exshift2(window: u8) -> Result<LocalIfs<SeqSpace>, IfsError> {
    let space = SeqSpace::new(3, window);
    let binary = CylinderSet::subshift(3, window, &[0, 1])?;
    let f2 = SymbolicMap::window(vec![0, 0], vec![1, 1])?;
    let maps = vec![SymbolicMap::Prepend(0), SymbolicMap::Prepend(1), f2];
    LocalIfs::new(space, maps, vec![binary.clone(), binary.clone(), binary])
}

/// Symbols `(2, 0^{m−2}, 2, 2, …)` of length `horizon + 1` for `δ = 2^{−m}`.
pub fn exshift2_word(m: u32, horizon: usize) -> Vec<u8> {
    let zeros = m.saturating_sub(2) as usize;
    (0..=horizon).map(|k| if k == 0 || k > zeros { 2 } else { 0 }).collect()
}

/// The pseudo-orbit `x⁰ = 010…`, `x¹ = f_2(x⁰) = 0011…`, then `f_0` until the pair of
/// ones would leave the first `m` symbols, where it is replaced by `0̄`, followed by
/// `f_2`-iterates of `0̄`. It is a `(a, 2^{−m})`-pseudo-orbit with one inexact step.
pub fn exshift2_pseudo_orbit(ifs: &LocalIfs<SeqSpace>, m: u32, horizon: usize) -> Result<PseudoOrbit<SeqPoint>, IfsError> {
    let a = exshift2_word(m.max(3), horizon);
    let zeros = m.max(3) as usize - 2;
    let mut points: Vec<SeqPoint> = vec![vec![0, 1]];
    for k in 0..horizon {
        let next = if k == zeros {
            Vec::new()
        } else {
            ifs.map(a[k] as usize).apply(&points[k], 3).expect("binary inputs stay in the alphabet")
        };
        points.push(next);
    }
    let delta = 0.5f64.powi(m as i32);
    let mut po = PseudoOrbit::from_parts(a, points, delta).expect("matching lengths");
    crate::shadowing::verify_pseudo_orbit(ifs, &mut po).map_err(|e| match e {
        crate::shadowing::ShadowError::Ifs(e) => e,
        other => unreachable!("{other}"),
    })?;
    Ok(po)
}

/// Gap curve of `exshift2` at `δ = 2^{−m}`, each point using its own word
/// [`exshift2_word`]`(m, horizon)`.
pub fn exshift2_gap_curve(ifs: &LocalIfs<SeqSpace>, ms: &[u32], horizon: usize) -> Result<GapCurve, ShadowError> {
    let points = ms
        .iter()
        .map(|&m| gap_at(ifs, &exshift2_word(m, horizon), 0.5f64.powi(m as i32)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(GapCurve { horizon, points })
}

pub fn beta_golden() -> BetaSystem {
    BetaSystem::golden()
}

pub fn beta_sparse() -> Result<BetaSystem, BetaError> {
    beta::solve_sparse_beta(&SPARSE_GAPS, SPARSE_GAPS.len(), 1e-12)
}

/// Vertices `v1, v2`, edges `a: v1 → v2` and `b: v2 → v1` on full fibers; `f_a` has
/// ratio ½, `f_b` is a quarter turn with ratio 0.4.
pub fn gd_2cycle(level: u8) -> Result<GdEmbedding, StabilityError> {
    let graph = DirectedGraph::new(2, vec![(0, 1), (1, 0)])?;
    let fa = AffineContraction::similarity(0.5, [0.3, 0.25]).map_err(IfsError::from)?;
    let fb = AffineContraction::new(2, [[0.0, -0.4], [0.4, 0.0]], [0.7, 0.3], 0.4).map_err(IfsError::from)?;
    graph_directed_embed(&graph, &[Region::Full, Region::Full], &[fa, fb], level, GD_GAP)
}

/// Checks the grid level is usable for the 2D builtins.
pub fn check_level(level: u8) -> Result<(), GeometryError> {
    GridSet::empty(2, level).map(|_| ())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::shadowing::shadow_search;
    use crate::space::Space;

    #[test]
    fn superfractal_domains() {
        let r = superfractal(0.3, 7).unwrap();
        let top = r.domain(2).bounding_box().unwrap().1[1];
        assert!(top <= 0.3 + r.domain(2).cell_size() + 1e-12);
        assert_eq!(r.domain(0), r.domain(1));
    }

    #[test]
    fn exshift2_orbit_has_one_jump() {
        let ifs = exshift2(16).unwrap();
        for m in 4..=10 {
            let po = exshift2_pseudo_orbit(&ifs, m, 32).unwrap();
            assert!(po.verified, "m = {m}");
            let inexact: Vec<usize> = (0..po.step_errors.len()).filter(|&k| po.step_errors[k] > 0.0).collect();
            assert_eq!(inexact, vec![m as usize - 2]);
            assert_eq!(po.points[1], vec![0, 0, 1, 1]);
            assert_eq!(po.step_errors[m as usize - 2], 0.5f64.powi(m as i32 + 1));
        }
    }

    #[test]
    fn exshift2_pseudo_orbit_is_not_shadowed() {
        let ifs = exshift2(16).unwrap();
        let po = exshift2_pseudo_orbit(&ifs, 6, 32).unwrap();
        let r = shadow_search(&ifs, &po, 0.25).unwrap();
        assert!(r.is_certified_none(), "{r:?}");
        let domain = ifs.orbit_domain(&po.symbols).unwrap();
        assert!(domain.words().iter().all(|w| w.len() >= 2 && w[0] == 0 && w[1] == 0));
        assert!(ifs.space().contains_point(&domain, &Vec::new()));
    }

    #[test]
    fn builtins_construct() {
        markov2(8).unwrap();
        global2(8).unwrap();
        nonsemicont(0.3, 8).unwrap();
        let gd = gd_2cycle(8).unwrap();
        assert_eq!(gd.ifs.len(), 2);
        assert!(beta_sparse().unwrap().beta_f64() > 4.0);
    }
}
