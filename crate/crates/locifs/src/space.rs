//! The set contract shared by both backends.
//!
//! Every local-IFS algorithm is written against [`Space`]: outer-approximated sets with
//! image, preimage, dilation and Hausdorff distance, plus the point-level operations the
//! shadowing module needs. [`GridSpace`] is `[0,1]^d` at a fixed dyadic level;
//! [`SeqSpace`] is `{0,…,n-1}^ℕ` with cylinders cut at a fixed window.

use std::fmt::Debug;

use rand::Rng;

use crate::geometry::{dist, point_box_distance, AffineContraction, GeometryError, GridSet};
use crate::symbolic::cylinder::{self, seq_distance, strict_ball_prefix, CylinderSet, SeqPoint, SymbolicMap};

pub trait Space: Clone + Debug + Send + Sync {
    type Set: Clone + PartialEq + Debug + Send + Sync;
    type Map: Clone + Debug + Send + Sync;
    type Point: Clone + PartialEq + Debug + Send + Sync;

    fn backend(&self) -> &'static str;
    fn full(&self) -> Self::Set;
    fn empty(&self) -> Self::Set;
    fn is_empty(&self, a: &Self::Set) -> bool;
    fn union(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn intersect(&self, a: &Self::Set, b: &Self::Set) -> Self::Set;
    fn is_subset(&self, a: &Self::Set, b: &Self::Set) -> bool;
    /// Occupied cells or cylinders.
    fn size(&self, a: &Self::Set) -> usize;
    fn image(&self, a: &Self::Set, f: &Self::Map) -> Self::Set;
    fn preimage(&self, a: &Self::Set, f: &Self::Map, domain: &Self::Set) -> Self::Set;
    /// Outer cover of the closed `r`-neighbourhood, `r >= 0`.
    fn dilate(&self, a: &Self::Set, r: f64) -> Self::Set;
    /// Directed distance between the representing clouds and the realizing element
    /// of `a` (printable), `None` when either set is empty.
    fn directed(&self, a: &Self::Set, b: &Self::Set) -> Option<(f64, String)>;
    /// Resolution slack: the diameter of one cell or one window-length cylinder.
    fn slack(&self) -> f64;
    fn space_diameter(&self) -> f64;
    fn diameter(&self, a: &Self::Set) -> f64;
    fn lipschitz(&self, f: &Self::Map) -> f64;
    /// True when `f(a)` stays inside the ambient space.
    fn maps_into_space(&self, a: &Self::Set, f: &Self::Map) -> bool;
    fn apply(&self, f: &Self::Map, p: &Self::Point) -> Option<Self::Point>;
    fn distance(&self, p: &Self::Point, q: &Self::Point) -> f64;
    fn contains_point(&self, a: &Self::Set, p: &Self::Point) -> bool;
    /// Lower bound on the distance from `p` to any set covered by `a`.
    fn distance_to_set(&self, p: &Self::Point, a: &Self::Set) -> Option<f64>;
    /// Cover of the open ball of radius `r` around `p`.
    fn ball(&self, p: &Self::Point, r: f64) -> Self::Set;
    /// One representative point per cell/cylinder, nearest to `p` first, at most `cap`.
    fn representatives(&self, a: &Self::Set, p: &Self::Point, cap: usize) -> Vec<Self::Point>;
    /// A point of `a` nearest to `p` (up to resolution).
    fn nearest_point(&self, a: &Self::Set, p: &Self::Point) -> Option<Self::Point>;
    /// A random point of `a`.
    fn sample<R: Rng>(&self, a: &Self::Set, rng: &mut R) -> Option<Self::Point>;
    /// A random point of `a` at distance `< r` from `center`.
    fn sample_near<R: Rng>(&self, a: &Self::Set, center: &Self::Point, r: f64, rng: &mut R) -> Option<Self::Point>;
    fn format_point(&self, p: &Self::Point) -> String;
    /// Coordinates for CSV export.
    fn point_fields(&self, p: &Self::Point) -> Vec<String>;
    fn point_header(&self) -> Vec<String>;

    fn hausdorff_raw(&self, a: &Self::Set, b: &Self::Set) -> Option<f64> {
        let (x, _) = self.directed(a, b)?;
        let (y, _) = self.directed(b, a)?;
        Some(x.max(y))
    }

    /// Upper bound on the Hausdorff distance of the represented sets.
    fn hausdorff(&self, a: &Self::Set, b: &Self::Set) -> Option<f64> {
        Some(self.hausdorff_raw(a, b)? + self.slack())
    }
}

/// `[0,1]^d` at dyadic level `L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpace {
    pub dim: u8,
    pub level: u8,
}

impl GridSpace {
    pub fn new(dim: u8, level: u8) -> Result<Self, GeometryError> {
        GridSet::empty(dim, level)?;
        Ok(Self { dim, level })
    }

    fn same(&self, a: &GridSet) {
        assert!(
            a.dim() == self.dim && a.level() == self.level,
            "grid set {a:?} used in space d={} L={}",
            self.dim,
            self.level
        );
    }
}

impl Space for GridSpace {
    type Set = GridSet;
    type Map = AffineContraction;
    type Point = [f64; 2];

    fn backend(&self) -> &'static str {
        "euclidean"
    }

    fn full(&self) -> GridSet {
        GridSet::full(self.dim, self.level).expect("validated level")
    }

    fn empty(&self) -> GridSet {
        GridSet::empty(self.dim, self.level).expect("validated level")
    }

    fn is_empty(&self, a: &GridSet) -> bool {
        a.is_empty()
    }

    fn union(&self, a: &GridSet, b: &GridSet) -> GridSet {
        self.same(a);
        a.union(b).expect("same grid")
    }

    fn intersect(&self, a: &GridSet, b: &GridSet) -> GridSet {
        self.same(a);
        a.intersect(b).expect("same grid")
    }

    fn is_subset(&self, a: &GridSet, b: &GridSet) -> bool {
        self.same(a);
        a.is_subset(b).expect("same grid")
    }

    fn size(&self, a: &GridSet) -> usize {
        a.count()
    }

    fn image(&self, a: &GridSet, f: &AffineContraction) -> GridSet {
        self.same(a);
        a.image(f)
    }

    fn preimage(&self, a: &GridSet, f: &AffineContraction, domain: &GridSet) -> GridSet {
        self.same(a);
        a.preimage(f, domain).expect("same grid")
    }

    fn dilate(&self, a: &GridSet, r: f64) -> GridSet {
        a.dilate(r.max(0.0)).expect("nonnegative radius")
    }

    fn directed(&self, a: &GridSet, b: &GridSet) -> Option<(f64, String)> {
        let (d, (x, y)) = a.directed_distance(b).ok()?;
        let c = a.cell_center(x, y);
        Some((d, self.format_point(&c)))
    }

    fn slack(&self) -> f64 {
        (self.dim as f64).sqrt() / (1u64 << self.level) as f64
    }

    fn space_diameter(&self) -> f64 {
        (self.dim as f64).sqrt()
    }

    fn diameter(&self, a: &GridSet) -> f64 {
        a.diameter()
    }

    fn lipschitz(&self, f: &AffineContraction) -> f64 {
        f.lambda()
    }

    fn maps_into_space(&self, a: &GridSet, f: &AffineContraction) -> bool {
        let tol = a.cell_diagonal();
        a.runs().iter().all(|r| {
            let (lo, _) = a.cell_box(r.start, r.row);
            let (_, hi) = a.cell_box(r.end - 1, r.row);
            f.box_image(lo, hi)
                .iter()
                .all(|p| (0..self.dim as usize).all(|k| p[k] >= -tol && p[k] <= 1.0 + tol))
        })
    }

    fn apply(&self, f: &AffineContraction, p: &[f64; 2]) -> Option<[f64; 2]> {
        Some(f.apply(*p))
    }

    fn distance(&self, p: &[f64; 2], q: &[f64; 2]) -> f64 {
        dist(*p, *q)
    }

    fn contains_point(&self, a: &GridSet, p: &[f64; 2]) -> bool {
        a.contains_point(*p)
    }

    fn distance_to_set(&self, p: &[f64; 2], a: &GridSet) -> Option<f64> {
        a.distance_lower_bound(*p)
    }

    fn ball(&self, p: &[f64; 2], r: f64) -> GridSet {
        let mut g = self.empty();
        if let Some((x, y)) = g.cell_of(*p) {
            g.insert_cell(x, y);
            if r > 0.0 {
                return g.dilate(r).expect("positive radius");
            }
        }
        g
    }

    fn representatives(&self, a: &GridSet, p: &[f64; 2], cap: usize) -> Vec<[f64; 2]> {
        a.nearest_centers(*p, cap)
    }

    fn nearest_point(&self, a: &GridSet, p: &[f64; 2]) -> Option<[f64; 2]> {
        let mut best: Option<(f64, [f64; 2])> = None;
        for (x, y) in a.cells() {
            let (lo, hi) = a.cell_box(x, y);
            let d = point_box_distance(*p, lo, hi);
            if best.is_none_or(|(b, _)| d < b) {
                best = Some((d, [p[0].clamp(lo[0], hi[0]), p[1].clamp(lo[1], hi[1])]));
            }
        }
        best.map(|(_, q)| q)
    }

    fn sample<R: Rng>(&self, a: &GridSet, rng: &mut R) -> Option<[f64; 2]> {
        let n = a.count();
        if n == 0 {
            return None;
        }
        let (x, y) = a.cells().nth(rng.random_range(0..n))?;
        let (lo, hi) = a.cell_box(x, y);
        let mut p = [lo[0] + rng.random::<f64>() * (hi[0] - lo[0]), 0.0];
        if self.dim == 2 {
            p[1] = lo[1] + rng.random::<f64>() * (hi[1] - lo[1]);
        }
        Some(p)
    }

    fn sample_near<R: Rng>(&self, a: &GridSet, center: &[f64; 2], r: f64, rng: &mut R) -> Option<[f64; 2]> {
        let ball = self.ball(center, r);
        let cells: Vec<(usize, usize)> = a
            .intersect(&ball)
            .ok()?
            .cells()
            .filter(|&(x, y)| {
                let (lo, hi) = a.cell_box(x, y);
                point_box_distance(*center, lo, hi) < r
            })
            .collect();
        if cells.is_empty() {
            return None;
        }
        let (x, y) = cells[rng.random_range(0..cells.len())];
        let (lo, hi) = a.cell_box(x, y);
        for _ in 0..32 {
            let mut p = [lo[0] + rng.random::<f64>() * (hi[0] - lo[0]), 0.0];
            if self.dim == 2 {
                p[1] = lo[1] + rng.random::<f64>() * (hi[1] - lo[1]);
            }
            if dist(p, *center) < r {
                return Some(p);
            }
        }
        Some([center[0].clamp(lo[0], hi[0]), center[1].clamp(lo[1], hi[1])])
    }

    fn format_point(&self, p: &[f64; 2]) -> String {
        if self.dim == 1 {
            format!("({:.6})", p[0])
        } else {
            format!("({:.6}, {:.6})", p[0], p[1])
        }
    }

    fn point_fields(&self, p: &[f64; 2]) -> Vec<String> {
        (0..self.dim as usize).map(|k| format!("{:.12}", p[k])).collect()
    }

    fn point_header(&self) -> Vec<String> {
        ["x", "y"][..self.dim as usize].iter().map(|s| s.to_string()).collect()
    }
}

/// `{0,…,n-1}^ℕ` with cylinders cut at `window` symbols.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SeqSpace {
    pub alphabet: u8,
    pub window: u8,
}

impl SeqSpace {
    pub fn new(alphabet: u8, window: u8) -> Self {
        Self { alphabet, window }
    }

    fn point_set(&self, p: &[u8]) -> CylinderSet {
        let w: Vec<u8> = (0..self.window as usize).map(|i| cylinder::symbol_at(p, i)).collect();
        CylinderSet::from_words(self.alphabet, self.window, [w]).expect("valid point")
    }
}

impl Space for SeqSpace {
    type Set = CylinderSet;
    type Map = SymbolicMap;
    type Point = SeqPoint;

    fn backend(&self) -> &'static str {
        "symbolic"
    }

    fn full(&self) -> CylinderSet {
        CylinderSet::full(self.alphabet, self.window)
    }

    fn empty(&self) -> CylinderSet {
        CylinderSet::empty(self.alphabet, self.window)
    }

    fn is_empty(&self, a: &CylinderSet) -> bool {
        a.is_empty()
    }

    fn union(&self, a: &CylinderSet, b: &CylinderSet) -> CylinderSet {
        a.union(b)
    }

    fn intersect(&self, a: &CylinderSet, b: &CylinderSet) -> CylinderSet {
        a.intersect(b)
    }

    fn is_subset(&self, a: &CylinderSet, b: &CylinderSet) -> bool {
        a.is_subset(b)
    }

    fn size(&self, a: &CylinderSet) -> usize {
        a.len()
    }

    fn image(&self, a: &CylinderSet, f: &SymbolicMap) -> CylinderSet {
        a.image(f)
    }

    fn preimage(&self, a: &CylinderSet, f: &SymbolicMap, domain: &CylinderSet) -> CylinderSet {
        a.preimage(f, domain)
    }

    fn dilate(&self, a: &CylinderSet, r: f64) -> CylinderSet {
        a.dilate(r)
    }

    fn directed(&self, a: &CylinderSet, b: &CylinderSet) -> Option<(f64, String)> {
        if a.is_empty() || b.is_empty() {
            return None;
        }
        let (mut best, mut at) = (-1.0, String::new());
        for w in a.words() {
            let single = CylinderSet::from_words(self.alphabet, self.window, [w.clone()]).ok()?;
            let d = single.directed_distance(b);
            if d > best {
                best = d;
                at = format!("[{}]", crate::symbolic::digits(w));
            }
        }
        Some((best, at))
    }

    fn slack(&self) -> f64 {
        0.5f64.powi(self.window as i32 + 1)
    }

    fn space_diameter(&self) -> f64 {
        0.5
    }

    fn diameter(&self, a: &CylinderSet) -> f64 {
        a.diameter()
    }

    fn lipschitz(&self, f: &SymbolicMap) -> f64 {
        f.lipschitz()
    }

    fn maps_into_space(&self, a: &CylinderSet, f: &SymbolicMap) -> bool {
        a.words().iter().all(|w| f.image_prefix(w, self.alphabet).is_some())
    }

    fn apply(&self, f: &SymbolicMap, p: &SeqPoint) -> Option<SeqPoint> {
        f.apply(p, self.alphabet)
    }

    fn distance(&self, p: &SeqPoint, q: &SeqPoint) -> f64 {
        seq_distance(p, q)
    }

    fn contains_point(&self, a: &CylinderSet, p: &SeqPoint) -> bool {
        a.contains_point(p)
    }

    fn distance_to_set(&self, p: &SeqPoint, a: &CylinderSet) -> Option<f64> {
        a.distance_to_point(p)
    }

    fn ball(&self, p: &SeqPoint, r: f64) -> CylinderSet {
        let m = strict_ball_prefix(r).min(self.window as usize);
        let w: Vec<u8> = (0..m).map(|i| cylinder::symbol_at(p, i)).collect();
        CylinderSet::from_words(self.alphabet, self.window, [w]).expect("valid point")
    }

    fn representatives(&self, a: &CylinderSet, p: &SeqPoint, cap: usize) -> Vec<SeqPoint> {
        let mut reps: Vec<(f64, usize, SeqPoint)> = a
            .representatives(p)
            .into_iter()
            .enumerate()
            .map(|(i, q)| (seq_distance(&q, p), i, q))
            .collect();
        reps.sort_by(|x, y| x.0.total_cmp(&y.0).then(x.1.cmp(&y.1)));
        reps.truncate(cap);
        reps.into_iter().map(|t| t.2).collect()
    }

    fn nearest_point(&self, a: &CylinderSet, p: &SeqPoint) -> Option<SeqPoint> {
        self.representatives(a, p, 1).pop()
    }

    fn sample<R: Rng>(&self, a: &CylinderSet, rng: &mut R) -> Option<SeqPoint> {
        if a.is_empty() {
            return None;
        }
        let w = &a.words()[rng.random_range(0..a.len())];
        Some(cylinder::trim(w.clone()))
    }

    fn sample_near<R: Rng>(&self, a: &CylinderSet, center: &SeqPoint, r: f64, rng: &mut R) -> Option<SeqPoint> {
        let inside = a.intersect(&self.ball(center, r));
        if inside.is_empty() {
            return None;
        }
        let w = &inside.words()[rng.random_range(0..inside.len())];
        Some(cylinder::trim(w.clone()))
    }

    fn format_point(&self, p: &SeqPoint) -> String {
        format!("{}0^∞", crate::symbolic::digits(p))
    }

    fn point_fields(&self, p: &SeqPoint) -> Vec<String> {
        vec![crate::symbolic::digits(p)]
    }

    fn point_header(&self) -> Vec<String> {
        vec!["sequence".into()]
    }
}

impl SeqSpace {
    /// Cover of a single point.
    pub fn singleton(&self, p: &SeqPoint) -> CylinderSet {
        self.point_set(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn grid_sampling_respects_radius() {
        let s = GridSpace::new(2, 7).unwrap();
        let target = GridSet::from_box(2, 7, [0.4, 0.4], [0.9, 0.9]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let p = s.sample_near(&target, &[0.45, 0.5], 0.03, &mut rng).unwrap();
            assert!(dist(p, [0.45, 0.5]) < 0.03);
            assert!(target.contains_point(p));
        }
        assert!(s.sample_near(&target, &[0.1, 0.1], 0.05, &mut rng).is_none());
    }

    #[test]
    fn sequence_sampling_respects_radius() {
        let s = SeqSpace::new(3, 10);
        let target = CylinderSet::subshift(3, 10, &[0, 1]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let center = vec![0, 1, 1, 0, 1];
        for _ in 0..50 {
            let p = s.sample_near(&target, &center, 0.1, &mut rng).unwrap();
            assert!(seq_distance(&p, &center) < 0.1);
            assert!(target.contains_point(&p));
        }
    }

    #[test]
    fn hausdorff_includes_slack() {
        let s = GridSpace::new(2, 5).unwrap();
        let full = s.full();
        assert_eq!(s.hausdorff(&full, &full), Some(s.slack()));
        let q = SeqSpace::new(2, 6);
        assert_eq!(q.hausdorff(&q.full(), &q.full()), Some(q.slack()));
        assert_eq!(q.hausdorff(&q.full(), &q.empty()), None);
    }
}
