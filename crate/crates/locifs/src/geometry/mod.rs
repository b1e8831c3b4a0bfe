//! Dyadic grid covers of compact subsets of `[0,1]^d`, `d ∈ {1, 2}`.
//!
//! A [`GridSet`] is an occupancy bitmask over the `2^(dL)` closed cells of side `2^-L`.
//! Every constructor and operation returns an outer approximation: the union of the
//! occupied closed cells contains the exact set being described.

mod affine;
mod edt;
pub mod io;
mod region;

use std::fmt;

use thiserror::Error;

pub use affine::{operator_norm, AffineContraction, NORM_TOLERANCE};
pub use region::{clip_polygon, Region};

use region::{polygon_area, polygon_meets_box};

/// Offsets closer than this to an integer (in cell units) snap to it.
const SNAP: f64 = 1e-9;

/// Largest supported resolution per dimension.
pub const MAX_LEVEL_2D: u8 = 12;
pub const MAX_LEVEL_1D: u8 = 24;

#[derive(Debug, Error)]
pub enum GeometryError {
    #[error("operation needs a nonempty set")]
    EmptySet,
    #[error("resolution mismatch: level {0} vs level {1}")]
    LevelMismatch(u8, u8),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(u8, u8),
    #[error("unsupported dimension {0}")]
    InvalidDimension(u8),
    #[error("unsupported level {level} for dimension {dim}")]
    InvalidLevel { dim: u8, level: u8 },
    #[error("negative radius {0}")]
    NegativeRadius(f64),
    #[error("not a contraction: operator norm {norm} exceeds declared constant {lambda}")]
    NotContraction { norm: f64, lambda: f64 },
    #[error("malformed data: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Outer cover of a compact subset of `[0,1]^d` by closed dyadic cells.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct GridSet {
    dim: u8,
    level: u8,
    bits: Vec<u64>,
}

impl fmt::Debug for GridSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridSet(d={}, L={}, cells={})", self.dim, self.level, self.count())
    }
}

/// A maximal horizontal run of occupied cells `[start, end)` in row `row`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Run {
    pub row: usize,
    pub start: usize,
    pub end: usize,
}

fn snap(v: f64) -> f64 {
    let r = v.round();
    if (v - r).abs() < SNAP {
        r
    } else {
        v
    }
}

/// Closed cells `lo..=hi` with positive-length overlap with `[a, b]` (cell units),
/// or the single cell holding `a` when the interval is degenerate.
fn cell_span(a: f64, b: f64, side: usize) -> Option<(usize, usize)> {
    let (a, b) = (snap(a), snap(b));
    let max = side as f64;
    if b < 0.0 || a > max || a.is_nan() || b.is_nan() {
        return None;
    }
    let clamp = |v: f64| v.clamp(0.0, max - 1.0) as usize;
    if b - a <= 0.0 {
        let i = clamp(a.floor());
        return Some((i, i));
    }
    let lo = clamp(a.floor());
    let hi = clamp(b.ceil() - 1.0);
    Some((lo, hi.max(lo)))
}

impl GridSet {
    fn check(dim: u8, level: u8) -> Result<(), GeometryError> {
        match dim {
            1 if (1..=MAX_LEVEL_1D).contains(&level) => Ok(()),
            2 if (1..=MAX_LEVEL_2D).contains(&level) => Ok(()),
            1 | 2 => Err(GeometryError::InvalidLevel { dim, level }),
            _ => Err(GeometryError::InvalidDimension(dim)),
        }
    }

    pub fn empty(dim: u8, level: u8) -> Result<Self, GeometryError> {
        Self::check(dim, level)?;
        let cells = 1usize << (dim as usize * level as usize);
        Ok(Self { dim, level, bits: vec![0; cells.div_ceil(64)] })
    }

    pub fn full(dim: u8, level: u8) -> Result<Self, GeometryError> {
        let mut g = Self::empty(dim, level)?;
        let cells = g.cell_count_total();
        for (k, w) in g.bits.iter_mut().enumerate() {
            let remaining = cells - 64 * k;
            *w = if remaining >= 64 { u64::MAX } else { (1u64 << remaining) - 1 };
        }
        Ok(g)
    }

    /// Outer cover of the closed box `[lo, hi]`.
    pub fn from_box(dim: u8, level: u8, lo: [f64; 2], hi: [f64; 2]) -> Result<Self, GeometryError> {
        let mut g = Self::empty(dim, level)?;
        g.mark_box(lo, hi);
        Ok(g)
    }

    /// Cover of a finite point cloud: each point marks the cell containing it.
    pub fn from_points(dim: u8, level: u8, pts: &[[f64; 2]]) -> Result<Self, GeometryError> {
        let mut g = Self::empty(dim, level)?;
        for &p in pts {
            g.mark_box(p, p);
        }
        Ok(g)
    }

    pub fn dim(&self) -> u8 {
        self.dim
    }

    pub fn level(&self) -> u8 {
        self.level
    }

    /// Cells per axis.
    pub fn side(&self) -> usize {
        1usize << self.level
    }

    pub fn rows(&self) -> usize {
        if self.dim == 1 {
            1
        } else {
            self.side()
        }
    }

    pub fn cell_size(&self) -> f64 {
        1.0 / self.side() as f64
    }

    /// Diameter of one cell.
    pub fn cell_diagonal(&self) -> f64 {
        self.cell_size() * (self.dim as f64).sqrt()
    }

    fn cell_count_total(&self) -> usize {
        self.side() * self.rows()
    }

    #[inline]
    fn index(&self, x: usize, y: usize) -> usize {
        y * self.side() + x
    }

    #[inline]
    pub fn contains_cell(&self, x: usize, y: usize) -> bool {
        let i = self.index(x, y);
        self.bits[i >> 6] >> (i & 63) & 1 == 1
    }

    #[inline]
    pub fn insert_cell(&mut self, x: usize, y: usize) {
        let i = self.index(x, y);
        self.bits[i >> 6] |= 1 << (i & 63);
    }

    pub fn remove_cell(&mut self, x: usize, y: usize) {
        let i = self.index(x, y);
        self.bits[i >> 6] &= !(1 << (i & 63));
    }

    /// Marks cells `x0..=x1` of row `y`.
    fn fill_row(&mut self, y: usize, x0: usize, x1: usize) {
        let (mut i, end) = (self.index(x0, y), self.index(x1, y) + 1);
        while i < end {
            let w = i >> 6;
            let off = i & 63;
            let n = (64 - off).min(end - i);
            let mask = if n == 64 { u64::MAX } else { ((1u64 << n) - 1) << off };
            self.bits[w] |= mask;
            i += n;
        }
    }

    fn fill_rect(&mut self, x0: usize, x1: usize, y0: usize, y1: usize) {
        for y in y0..=y1 {
            self.fill_row(y, x0, x1);
        }
    }

    /// Cell index ranges covering `[lo, hi]` (outer rule with snapping).
    fn span(&self, lo: [f64; 2], hi: [f64; 2]) -> Option<((usize, usize), (usize, usize))> {
        let s = self.side() as f64;
        let xs = cell_span(lo[0] * s, hi[0] * s, self.side())?;
        let ys = if self.dim == 1 { (0, 0) } else { cell_span(lo[1] * s, hi[1] * s, self.side())? };
        Some((xs, ys))
    }

    pub(crate) fn mark_box(&mut self, lo: [f64; 2], hi: [f64; 2]) {
        if let Some(((x0, x1), (y0, y1))) = self.span(lo, hi) {
            self.fill_rect(x0, x1, y0, y1);
        }
    }

    /// Marks every cell meeting the convex polygon `pts` (interior overlap, or closed
    /// contact when the polygon has no area).
    pub(crate) fn mark_convex(&mut self, pts: &[[f64; 2]]) {
        for (x, y) in self.convex_cells(pts) {
            self.insert_cell(x, y);
        }
    }

    fn convex_cells(&self, pts: &[[f64; 2]]) -> Vec<(usize, usize)> {
        let fold = |k: usize, init: f64, op: fn(f64, f64) -> f64| pts.iter().map(|p| p[k]).fold(init, op);
        let lo = [fold(0, f64::INFINITY, f64::min), fold(1, f64::INFINITY, f64::min)];
        let hi = [fold(0, f64::NEG_INFINITY, f64::max), fold(1, f64::NEG_INFINITY, f64::max)];
        let Some(((x0, x1), (y0, y1))) = self.span(lo, hi) else { return Vec::new() };
        if self.dim == 1 {
            return (x0..=x1).map(|x| (x, 0)).collect();
        }
        if x0 == x1 && y0 == y1 {
            return vec![(x0, y0)];
        }
        let h = self.cell_size();
        let degenerate = polygon_area(pts) <= 1e-9 * h * h;
        let eps = SNAP * h;
        let mut out = Vec::new();
        for y in y0..=y1 {
            for x in x0..=x1 {
                let (clo, chi) = self.cell_box(x, y);
                if polygon_meets_box(pts, clo, chi, !degenerate, eps) {
                    out.push((x, y));
                }
            }
        }
        out
    }

    /// Closed box of cell `(x, y)`.
    pub fn cell_box(&self, x: usize, y: usize) -> ([f64; 2], [f64; 2]) {
        let h = self.cell_size();
        if self.dim == 1 {
            ([x as f64 * h, 0.0], [(x + 1) as f64 * h, 0.0])
        } else {
            ([x as f64 * h, y as f64 * h], [(x + 1) as f64 * h, (y + 1) as f64 * h])
        }
    }

    pub fn cell_center(&self, x: usize, y: usize) -> [f64; 2] {
        let h = self.cell_size();
        if self.dim == 1 {
            [(x as f64 + 0.5) * h, 0.0]
        } else {
            [(x as f64 + 0.5) * h, (y as f64 + 0.5) * h]
        }
    }

    /// Cell `(x, y)` whose closed box holds `p` (the lower-index one on grid lines).
    pub fn cell_of(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        let ((x, _), (y, _)) = self.span(p, p)?;
        Some((x, y))
    }

    /// True when `p` lies in some occupied closed cell.
    pub fn contains_point(&self, p: [f64; 2]) -> bool {
        let s = self.side() as f64;
        let axis = |v: f64| -> Vec<usize> {
            let u = snap(v * s);
            if !(0.0..=s).contains(&u) {
                return Vec::new();
            }
            let f = u.floor();
            let mut out = Vec::with_capacity(2);
            if f < s {
                out.push(f as usize);
            }
            if f == u && f >= 1.0 {
                out.push(f as usize - 1);
            }
            out
        };
        let xs = axis(p[0]);
        let ys = if self.dim == 1 { vec![0] } else { axis(p[1]) };
        xs.iter().any(|&x| ys.iter().any(|&y| self.contains_cell(x, y)))
    }

    pub fn count(&self) -> usize {
        self.bits.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.iter().all(|&w| w == 0)
    }

    /// Occupied cells in row-major order.
    pub fn cells(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let side = self.side();
        let shift = self.level as usize;
        self.bits.iter().enumerate().flat_map(move |(k, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                let i = 64 * k + t;
                Some((i & (side - 1), i >> shift))
            })
        })
    }

    /// Maximal horizontal runs of occupied cells, row by row.
    pub fn runs(&self) -> Vec<Run> {
        let mut out = Vec::new();
        let mut cur: Option<Run> = None;
        for (x, y) in self.cells() {
            match cur.as_mut() {
                Some(r) if r.row == y && r.end == x => r.end = x + 1,
                _ => {
                    if let Some(r) = cur.take() {
                        out.push(r);
                    }
                    cur = Some(Run { row: y, start: x, end: x + 1 });
                }
            }
        }
        out.extend(cur);
        out
    }

    fn compatible(&self, other: &Self) -> Result<(), GeometryError> {
        if self.dim != other.dim {
            return Err(GeometryError::DimensionMismatch(self.dim, other.dim));
        }
        if self.level != other.level {
            return Err(GeometryError::LevelMismatch(self.level, other.level));
        }
        Ok(())
    }

    fn zip(&self, other: &Self, op: impl Fn(u64, u64) -> u64) -> Result<Self, GeometryError> {
        self.compatible(other)?;
        let bits = self.bits.iter().zip(&other.bits).map(|(&a, &b)| op(a, b)).collect();
        Ok(Self { dim: self.dim, level: self.level, bits })
    }

    pub fn union(&self, other: &Self) -> Result<Self, GeometryError> {
        self.zip(other, |a, b| a | b)
    }

    pub fn intersect(&self, other: &Self) -> Result<Self, GeometryError> {
        self.zip(other, |a, b| a & b)
    }

    pub fn difference(&self, other: &Self) -> Result<Self, GeometryError> {
        self.zip(other, |a, b| a & !b)
    }

    pub fn is_subset(&self, other: &Self) -> Result<bool, GeometryError> {
        self.compatible(other)?;
        Ok(self.bits.iter().zip(&other.bits).all(|(&a, &b)| a & !b == 0))
    }

    pub fn intersects(&self, other: &Self) -> Result<bool, GeometryError> {
        self.compatible(other)?;
        Ok(self.bits.iter().zip(&other.bits).any(|(&a, &b)| a & b != 0))
    }

    /// Smallest box containing every occupied cell.
    pub fn bounding_box(&self) -> Option<([f64; 2], [f64; 2])> {
        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for r in self.runs() {
            let (a, _) = self.cell_box(r.start, r.row);
            let (_, b) = self.cell_box(r.end - 1, r.row);
            for k in 0..2 {
                lo[k] = lo[k].min(a[k]);
                hi[k] = hi[k].max(b[k]);
            }
        }
        (lo[0] <= hi[0]).then_some((lo, hi))
    }

    /// Exact diameter of the union of occupied closed cells (0 for the empty set).
    pub fn diameter(&self) -> f64 {
        let mut pts = Vec::new();
        for r in self.runs() {
            let (a, _) = self.cell_box(r.start, r.row);
            let (_, b) = self.cell_box(r.end - 1, r.row);
            pts.extend([[a[0], a[1]], [b[0], a[1]], [a[0], b[1]], [b[0], b[1]]]);
        }
        let hull = convex_hull(pts);
        let mut best: f64 = 0.0;
        for i in 0..hull.len() {
            for j in (i + 1)..hull.len() {
                best = best.max(dist(hull[i], hull[j]));
            }
        }
        best
    }

    /// Each cell split into its `2^d` children.
    pub fn refine(&self) -> Result<Self, GeometryError> {
        let mut out = Self::empty(self.dim, self.level + 1)?;
        for r in self.runs() {
            let (y0, y1) = if self.dim == 1 { (0, 0) } else { (2 * r.row, 2 * r.row + 1) };
            out.fill_rect(2 * r.start, 2 * r.end - 1, y0, y1);
        }
        Ok(out)
    }

    /// A cell is occupied when any of its children is.
    pub fn coarsen(&self) -> Result<Self, GeometryError> {
        if self.level <= 1 {
            return Err(GeometryError::InvalidLevel { dim: self.dim, level: 0 });
        }
        let mut out = Self::empty(self.dim, self.level - 1)?;
        for (x, y) in self.cells() {
            out.insert_cell(x / 2, y / 2);
        }
        Ok(out)
    }

    /// Calls `visit` on every cell of the image cover of one closed box.
    fn for_image_cells(&self, f: &AffineContraction, lo: [f64; 2], hi: [f64; 2], mut visit: impl FnMut(usize, usize) -> bool) -> bool {
        if self.dim == 1 || f.is_diagonal() {
            let a = f.apply(lo);
            let b = f.apply(hi);
            let ilo = [a[0].min(b[0]), a[1].min(b[1])];
            let ihi = [a[0].max(b[0]), a[1].max(b[1])];
            if let Some(((x0, x1), (y0, y1))) = self.span(ilo, ihi) {
                for y in y0..=y1 {
                    for x in x0..=x1 {
                        if visit(x, y) {
                            return true;
                        }
                    }
                }
            }
            return false;
        }
        let pts = f.box_image(lo, hi);
        self.convex_cells(&pts).into_iter().any(|(x, y)| visit(x, y))
    }

    /// Outer cover of `f(A)`.
    pub fn image(&self, f: &AffineContraction) -> Self {
        let mut out = Self { dim: self.dim, level: self.level, bits: vec![0; self.bits.len()] };
        if self.dim == 1 || f.is_diagonal() {
            for r in self.runs() {
                let (lo, _) = self.cell_box(r.start, r.row);
                let (_, hi) = self.cell_box(r.end - 1, r.row);
                let a = f.apply(lo);
                let b = f.apply(hi);
                out.mark_box([a[0].min(b[0]), a[1].min(b[1])], [a[0].max(b[0]), a[1].max(b[1])]);
            }
        } else {
            for (x, y) in self.cells() {
                let (lo, hi) = self.cell_box(x, y);
                out.mark_convex(&f.box_image(lo, hi));
            }
        }
        out
    }

    /// Outer cover of `{x ∈ domain : f(x) ∈ A}` by per-cell forward testing.
    pub fn preimage(&self, f: &AffineContraction, domain: &Self) -> Result<Self, GeometryError> {
        self.compatible(domain)?;
        let mut out = Self { dim: self.dim, level: self.level, bits: vec![0; self.bits.len()] };
        if self.is_empty() {
            return Ok(out);
        }
        let table = SummedArea::new(self);
        let exact_span = self.dim == 1 || f.is_diagonal();
        for (x, y) in domain.cells() {
            let (lo, hi) = domain.cell_box(x, y);
            let pts = f.box_image(lo, hi);
            let fold = |k: usize, init: f64, op: fn(f64, f64) -> f64| pts.iter().map(|p| p[k]).fold(init, op);
            let ilo = [fold(0, f64::INFINITY, f64::min), fold(1, f64::INFINITY, f64::min)];
            let ihi = [fold(0, f64::NEG_INFINITY, f64::max), fold(1, f64::NEG_INFINITY, f64::max)];
            let Some(((x0, x1), (y0, y1))) = self.span(ilo, ihi) else { continue };
            let hits = table.count(x0, x1, y0, y1);
            let hit = if hits == 0 {
                false
            } else if exact_span || hits == (x1 - x0 + 1) * (y1 - y0 + 1) {
                true
            } else {
                self.for_image_cells(f, lo, hi, |u, v| self.contains_cell(u, v))
            };
            if hit {
                out.insert_cell(x, y);
            }
        }
        Ok(out)
    }

    /// Squared distance transform (cell units) to the occupied cells, on cell centers.
    fn distance_field(&self) -> Vec<f64> {
        let (w, h) = (self.side(), self.rows());
        edt::squared_edt(|x, y| self.contains_cell(x, y), w, h)
    }

    /// Outer cover of the closed `r`-neighbourhood: all cells whose box lies within `r`
    /// of some occupied box.
    pub fn dilate(&self, r: f64) -> Result<Self, GeometryError> {
        if r < 0.0 || r.is_nan() {
            return Err(GeometryError::NegativeRadius(r));
        }
        if r == 0.0 || self.is_empty() {
            return Ok(self.clone());
        }
        // Cells at box distance <= r from A are the cells whose center distance (in
        // cells) to the one-cell Chebyshev thickening of A is <= r/h.
        let mut thick = self.clone();
        let (w, rows) = (self.side(), self.rows());
        for (x, y) in self.cells() {
            let (x0, x1) = (x.saturating_sub(1), (x + 1).min(w - 1));
            let (y0, y1) = if self.dim == 1 { (0, 0) } else { (y.saturating_sub(1), (y + 1).min(rows - 1)) };
            thick.fill_rect(x0, x1, y0, y1);
        }
        let field = thick.distance_field();
        let limit = (r / self.cell_size()).powi(2) * (1.0 + 1e-12) + 1e-9;
        let mut out = Self { dim: self.dim, level: self.level, bits: vec![0; self.bits.len()] };
        for y in 0..rows {
            for x in 0..w {
                if field[y * w + x] <= limit {
                    out.insert_cell(x, y);
                }
            }
        }
        Ok(out)
    }

    /// Cells that stay inside after eroding by `r`: complement of the dilated complement.
    pub fn erode(&self, r: f64) -> Result<Self, GeometryError> {
        if r < 0.0 || r.is_nan() {
            return Err(GeometryError::NegativeRadius(r));
        }
        if r == 0.0 {
            return Ok(self.clone());
        }
        let full = Self::full(self.dim, self.level)?;
        let outside = full.difference(self)?;
        let grown = if outside.is_empty() { outside } else { outside.dilate(r)? };
        full.difference(&grown)?.intersect(self)
    }

    /// Directed distance `max_{a ∈ self} min_{b ∈ other}` between cell-center clouds,
    /// with the cell of `self` realizing it.
    pub fn directed_distance(&self, other: &Self) -> Result<(f64, (usize, usize)), GeometryError> {
        self.compatible(other)?;
        if self.is_empty() || other.is_empty() {
            return Err(GeometryError::EmptySet);
        }
        let field = other.distance_field();
        let w = self.side();
        let mut best = (-1.0, (0, 0));
        for (x, y) in self.cells() {
            let d = field[y * w + x];
            if d > best.0 {
                best = (d, (x, y));
            }
        }
        Ok((best.0.sqrt() * self.cell_size(), best.1))
    }

    /// Hausdorff distance between the cell-center clouds, without slack.
    pub fn hausdorff_raw(&self, other: &Self) -> Result<f64, GeometryError> {
        let (a, _) = self.directed_distance(other)?;
        let (b, _) = other.directed_distance(self)?;
        Ok(a.max(b))
    }

    /// Upper bound on the Hausdorff distance of the covered sets:
    /// center-cloud distance plus one cell diagonal.
    pub fn hausdorff_distance(&self, other: &Self) -> Result<f64, GeometryError> {
        Ok(self.hausdorff_raw(other)? + self.cell_diagonal())
    }

    /// Certificate that `inner` sits inside `self` with margin `zeta`.
    pub fn contains_with_margin(&self, inner: &Self, zeta: f64) -> Result<bool, GeometryError> {
        self.compatible(inner)?;
        inner.dilate(zeta)?.is_subset(self)
    }

    /// Lower bound on `inf_{q ∈ set} |p - q|` for any set covered by `self`.
    pub fn distance_lower_bound(&self, p: [f64; 2]) -> Option<f64> {
        let mut best = f64::INFINITY;
        for r in self.runs() {
            let (lo, _) = self.cell_box(r.start, r.row);
            let (_, hi) = self.cell_box(r.end - 1, r.row);
            best = best.min(point_box_distance(p, lo, hi));
        }
        best.is_finite().then_some(best)
    }

    /// Cell centers sorted by distance to `p` (ties by row-major index), at most `cap`.
    pub fn nearest_centers(&self, p: [f64; 2], cap: usize) -> Vec<[f64; 2]> {
        let mut all: Vec<(f64, usize, [f64; 2])> = self
            .cells()
            .enumerate()
            .map(|(i, (x, y))| {
                let c = self.cell_center(x, y);
                (dist(c, p), i, c)
            })
            .collect();
        all.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        all.truncate(cap);
        all.into_iter().map(|t| t.2).collect()
    }
}

/// Occupied-cell counts over axis-aligned cell rectangles.
struct SummedArea {
    w: usize,
    sums: Vec<usize>,
}

impl SummedArea {
    fn new(set: &GridSet) -> Self {
        let (w, h) = (set.side(), set.rows());
        let mut sums = vec![0; (w + 1) * (h + 1)];
        for y in 0..h {
            let mut row = 0;
            for x in 0..w {
                row += set.contains_cell(x, y) as usize;
                sums[(y + 1) * (w + 1) + x + 1] = sums[y * (w + 1) + x + 1] + row;
            }
        }
        Self { w: w + 1, sums }
    }

    /// Occupied cells in `[x0, x1] × [y0, y1]` (inclusive).
    fn count(&self, x0: usize, x1: usize, y0: usize, y1: usize) -> usize {
        let at = |x: usize, y: usize| self.sums[y * self.w + x];
        at(x1 + 1, y1 + 1) + at(x0, y0) - at(x0, y1 + 1) - at(x1 + 1, y0)
    }
}

pub fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

pub fn point_box_distance(p: [f64; 2], lo: [f64; 2], hi: [f64; 2]) -> f64 {
    let dx = (lo[0] - p[0]).max(0.0).max(p[0] - hi[0]);
    let dy = (lo[1] - p[1]).max(0.0).max(p[1] - hi[1]);
    (dx * dx + dy * dy).sqrt()
}

/// Andrew's monotone chain; returns hull vertices (collinear points dropped).
fn convex_hull(mut pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    pts.sort_by(|a, b| a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
    let mut hull: Vec<[f64; 2]> = Vec::with_capacity(2 * pts.len());
    for &p in pts.iter().chain(pts.iter().rev().skip(1)) {
        while hull.len() >= 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], p) <= 0.0 {
            hull.pop();
        }
        hull.push(p);
    }
    hull.pop();
    hull
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(level: u8, lo: f64, hi: f64) -> GridSet {
        GridSet::from_box(2, level, [lo, lo], [hi, hi]).unwrap()
    }

    #[test]
    fn identical_sets_have_one_diagonal() {
        let a = GridSet::full(2, 6).unwrap();
        let d = a.hausdorff_distance(&a).unwrap();
        assert!((d - 2f64.sqrt() / 64.0).abs() < 1e-15);
    }

    #[test]
    fn opposite_corner_cells() {
        let h = 1.0 / 64.0;
        let a = GridSet::from_box(2, 6, [0.0, 0.0], [h, h]).unwrap();
        let b = GridSet::from_box(2, 6, [1.0 - h, 1.0 - h], [1.0, 1.0]).unwrap();
        assert_eq!(a.count(), 1);
        assert_eq!(b.count(), 1);
        // Exact set distance: the far corners are sqrt(2) apart, nearest corners sqrt(2)(1 - 2h).
        let exact = 2f64.sqrt() * (1.0 - h);
        let d = a.hausdorff_distance(&b).unwrap();
        assert!((d - exact).abs() <= a.cell_diagonal() + 1e-12, "{d} vs {exact}");
    }

    #[test]
    fn segment_to_square_is_one() {
        let seg = GridSet::from_box(2, 6, [0.0, 0.0], [1.0, 0.0]).unwrap();
        assert_eq!(seg.count(), 64);
        let full = GridSet::full(2, 6).unwrap();
        let d = seg.hausdorff_distance(&full).unwrap();
        assert!((d - 1.0).abs() <= seg.cell_diagonal() + 1e-12);
    }

    #[test]
    fn empty_and_mismatch_errors() {
        let a = GridSet::empty(2, 4).unwrap();
        let b = GridSet::full(2, 4).unwrap();
        assert!(matches!(a.hausdorff_distance(&b), Err(GeometryError::EmptySet)));
        let c = GridSet::full(2, 5).unwrap();
        assert!(matches!(b.hausdorff_distance(&c), Err(GeometryError::LevelMismatch(4, 5))));
    }

    #[test]
    fn half_scale_image_of_square() {
        let f = AffineContraction::similarity(0.5, [0.0, 0.0]).unwrap();
        let img = GridSet::full(2, 4).unwrap().image(&f);
        assert!(img.count() <= 81);
        assert_eq!(img, square(4, 0.0, 0.5));
        assert!(GridSet::empty(2, 4).unwrap().image(&f).is_empty());
    }

    #[test]
    fn constant_map_gives_one_cell() {
        let f = AffineContraction::new(2, [[0.0; 2]; 2], [0.3, 0.7], 0.0).unwrap();
        let img = GridSet::full(2, 5).unwrap().image(&f);
        assert_eq!(img.count(), 1);
        assert!(img.contains_point([0.3, 0.7]));
    }

    #[test]
    fn preimage_examples() {
        let f = AffineContraction::similarity(0.5, [0.0, 0.0]).unwrap();
        let full = GridSet::full(2, 5).unwrap();
        let dom = square(5, 0.0, 0.75);
        assert_eq!(full.preimage(&f, &dom).unwrap(), dom);
        let quarter = square(5, 0.0, 0.25);
        assert_eq!(quarter.preimage(&f, &full).unwrap(), square(5, 0.0, 0.5));
        let none = GridSet::empty(2, 5).unwrap();
        assert!(none.preimage(&f, &full).unwrap().is_empty());
    }

    #[test]
    fn dilate_single_cell_matches_box_distance_oracle() {
        let level = 6;
        let h = 1.0 / 64.0;
        let mut a = GridSet::empty(2, level).unwrap();
        a.insert_cell(32, 32);
        let d = a.dilate(0.25).unwrap();
        let (clo, chi) = a.cell_box(32, 32);
        for y in 0..64 {
            for x in 0..64 {
                let (lo, hi) = d.cell_box(x, y);
                let gap_x = (clo[0] - hi[0]).max(lo[0] - chi[0]).max(0.0);
                let gap_y = (clo[1] - hi[1]).max(lo[1] - chi[1]).max(0.0);
                let box_dist = (gap_x * gap_x + gap_y * gap_y).sqrt();
                assert_eq!(d.contains_cell(x, y), box_dist <= 0.25 + 1e-12, "cell {x},{y} dist {box_dist}");
            }
        }
        assert!(d.count() > (0.25f64 / h).powi(2) as usize);
        assert_eq!(a.dilate(0.0).unwrap(), a);
        assert!(GridSet::empty(2, 6).unwrap().dilate(0.3).unwrap().is_empty());
        assert!(matches!(a.dilate(-1.0), Err(GeometryError::NegativeRadius(_))));
    }

    #[test]
    fn margin_examples() {
        let outer = GridSet::full(2, 6).unwrap();
        let inner = square(6, 0.4, 0.6);
        assert!(outer.contains_with_margin(&inner, 0.3).unwrap());
        assert!(inner.contains_with_margin(&inner, 0.0).unwrap());
        let half = square(6, 0.0, 0.5);
        assert!(!half.contains_with_margin(&half, 0.1).unwrap());
    }

    #[test]
    fn refine_then_coarsen_roundtrip() {
        let a = square(5, 0.13, 0.61);
        let r = a.refine().unwrap();
        assert_eq!(r.count(), 4 * a.count());
        assert_eq!(r.coarsen().unwrap(), a);
    }

    #[test]
    fn diameter_of_full_square_and_segment() {
        assert!((GridSet::full(2, 5).unwrap().diameter() - 2f64.sqrt()).abs() < 1e-12);
        let seg = GridSet::from_box(1, 8, [0.25, 0.0], [0.5, 0.0]).unwrap();
        assert!((seg.diameter() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_ops() {
        let a = GridSet::from_box(1, 10, [0.25, 0.0], [0.5, 0.0]).unwrap();
        assert_eq!(a.count(), 256);
        let f = AffineContraction::line(0.5, 0.5).unwrap();
        assert_eq!(a.image(&f), GridSet::from_box(1, 10, [0.625, 0.0], [0.75, 0.0]).unwrap());
        // Closed neighbourhood: the two cells touching it at distance exactly r count.
        let d = a.dilate(0.125).unwrap();
        let h = a.cell_size();
        assert_eq!(d, GridSet::from_box(1, 10, [0.125 - h, 0.0], [0.625 + h, 0.0]).unwrap());
        let e = d.erode(0.125).unwrap();
        assert_eq!(e, a);
    }

    #[test]
    fn rotated_image_contains_point_images() {
        let (s, c) = (0.7f64.sin(), 0.7f64.cos());
        let f = AffineContraction::with_norm(2, [[0.4 * c, -0.4 * s], [0.4 * s, 0.4 * c]], [0.5, 0.1]).unwrap();
        let a = square(7, 0.2, 0.9);
        let img = a.image(&f);
        for i in 0..50 {
            for j in 0..50 {
                let p = [0.2 + 0.7 * i as f64 / 49.0, 0.2 + 0.7 * j as f64 / 49.0];
                assert!(img.contains_point(f.apply(p)));
            }
        }
    }

    proptest::proptest! {
        #[test]
        fn preimage_matches_per_cell_test(th in 0.0f64..6.3, r in 0.2f64..0.6, tx in 0.0f64..0.4, ty in 0.0f64..0.4, lo in 0.0f64..0.5, hi in 0.5f64..1.0) {
            let f = AffineContraction::with_norm(2, [[r * th.cos(), -r * th.sin()], [r * th.sin(), r * th.cos()]], [tx + 0.3, ty]).unwrap();
            let a = square(6, lo, hi);
            let domain = GridSet::full(2, 6).unwrap();
            let fast = a.preimage(&f, &domain).unwrap();
            let mut slow = GridSet::empty(2, 6).unwrap();
            for (x, y) in domain.cells() {
                let (clo, chi) = domain.cell_box(x, y);
                if a.for_image_cells(&f, clo, chi, |u, v| a.contains_cell(u, v)) {
                    slow.insert_cell(x, y);
                }
            }
            proptest::prop_assert_eq!(fast, slow);
        }
    }
}
