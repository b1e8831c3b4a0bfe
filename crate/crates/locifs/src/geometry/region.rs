use super::{GeometryError, GridSet};

/// Exact description of a compact subset of `[0,1]^d`, rasterized to an outer cover.
#[derive(Debug, Clone, PartialEq)]
pub enum Region {
    /// The whole ambient cube.
    Full,
    /// Union of closed axis-aligned boxes. One-dimensional boxes use only the first coordinate.
    Boxes(Vec<([f64; 2], [f64; 2])>),
    /// Closed convex polygon given by its vertices in order; may be degenerate.
    Polygon(Vec<[f64; 2]>),
}

impl Region {
    pub fn interval(a: f64, b: f64) -> Self {
        Region::Boxes(vec![([a, 0.0], [b, 0.0])])
    }

    pub fn square(lo: [f64; 2], hi: [f64; 2]) -> Self {
        Region::Boxes(vec![(lo, hi)])
    }

    pub fn rasterize(&self, dim: u8, level: u8) -> Result<GridSet, GeometryError> {
        let mut g = GridSet::empty(dim, level)?;
        match self {
            Region::Full => return GridSet::full(dim, level),
            Region::Boxes(boxes) => {
                for (lo, hi) in boxes {
                    if (0..dim as usize).any(|k| lo[k] > hi[k]) {
                        return Err(GeometryError::Format(format!("box with min {lo:?} > max {hi:?}")));
                    }
                    g.mark_box(*lo, *hi);
                }
            }
            Region::Polygon(pts) => {
                if dim != 2 {
                    return Err(GeometryError::InvalidDimension(dim));
                }
                if pts.is_empty() {
                    return Err(GeometryError::Format("polygon without vertices".into()));
                }
                g.mark_convex(pts);
            }
        }
        Ok(g)
    }

    /// Intersection with the half-plane `{p : p[axis] <= bound}` (polygons and boxes only).
    pub fn clip_below(&self, axis: usize, bound: f64) -> Region {
        match self {
            Region::Full => Region::Boxes(vec![{
                let mut hi = [1.0, 1.0];
                hi[axis] = bound.min(1.0);
                ([0.0, 0.0], hi)
            }]),
            Region::Boxes(boxes) => Region::Boxes(
                boxes
                    .iter()
                    .filter(|(lo, _)| lo[axis] <= bound)
                    .map(|(lo, hi)| {
                        let mut hi = *hi;
                        hi[axis] = hi[axis].min(bound);
                        (*lo, hi)
                    })
                    .collect(),
            ),
            Region::Polygon(pts) => Region::Polygon(clip_polygon(pts, axis, bound)),
        }
    }
}

/// Sutherland–Hodgman clip of a convex polygon against `p[axis] <= bound`.
pub fn clip_polygon(pts: &[[f64; 2]], axis: usize, bound: f64) -> Vec<[f64; 2]> {
    let mut out = Vec::new();
    let n = pts.len();
    for i in 0..n {
        let cur = pts[i];
        let next = pts[(i + 1) % n];
        let cur_in = cur[axis] <= bound;
        let next_in = next[axis] <= bound;
        if cur_in {
            out.push(cur);
        }
        if cur_in != next_in {
            let t = (bound - cur[axis]) / (next[axis] - cur[axis]);
            let mut p = [cur[0] + t * (next[0] - cur[0]), cur[1] + t * (next[1] - cur[1])];
            p[axis] = bound;
            out.push(p);
        }
    }
    out.dedup();
    if out.len() > 1 && out.first() == out.last() {
        out.pop();
    }
    out
}

pub(crate) fn polygon_area(pts: &[[f64; 2]]) -> f64 {
    let n = pts.len();
    let mut s = 0.0;
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        s += a[0] * b[1] - a[1] * b[0];
    }
    0.5 * s.abs()
}

/// Separating-axis test between a convex polygon and the closed box `[lo, hi]`.
///
/// With `strict`, boxes that only touch the polygon along their boundary are rejected.
pub(crate) fn polygon_meets_box(pts: &[[f64; 2]], lo: [f64; 2], hi: [f64; 2], strict: bool, eps: f64) -> bool {
    let separated = |axis: [f64; 2]| {
        let norm = (axis[0] * axis[0] + axis[1] * axis[1]).sqrt();
        if norm == 0.0 {
            return false;
        }
        let (mut pmin, mut pmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in pts {
            let v = p[0] * axis[0] + p[1] * axis[1];
            pmin = pmin.min(v);
            pmax = pmax.max(v);
        }
        let (mut bmin, mut bmax) = (f64::INFINITY, f64::NEG_INFINITY);
        for c in [[lo[0], lo[1]], [hi[0], lo[1]], [hi[0], hi[1]], [lo[0], hi[1]]] {
            let v = c[0] * axis[0] + c[1] * axis[1];
            bmin = bmin.min(v);
            bmax = bmax.max(v);
        }
        let overlap = pmax.min(bmax) - pmin.max(bmin);
        if strict {
            overlap <= eps * norm
        } else {
            overlap < -eps * norm
        }
    };
    if separated([1.0, 0.0]) || separated([0.0, 1.0]) {
        return false;
    }
    let n = pts.len();
    for i in 0..n {
        let a = pts[i];
        let b = pts[(i + 1) % n];
        if separated([a[1] - b[1], b[0] - a[0]]) {
            return false;
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clip_triangle_to_strip() {
        let tri = [[0.0, 0.0], [1.0, 0.0], [0.5, 0.8]];
        let clipped = clip_polygon(&tri, 1, 0.4);
        assert_eq!(clipped.len(), 4);
        assert!((polygon_area(&clipped) - (0.4 - 0.5 * 0.4 * 0.4 / 0.8)).abs() < 1e-12);
        let segment = clip_polygon(&tri, 1, 0.0);
        assert!(polygon_area(&segment) < 1e-15);
        assert!(segment.iter().all(|p| p[1] == 0.0));
    }

    #[test]
    fn touching_boxes_are_strictly_rejected() {
        let tri = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]];
        assert!(!polygon_meets_box(&tri, [0.5, 0.0], [0.6, 0.1], true, 1e-12));
        assert!(polygon_meets_box(&tri, [0.5, 0.0], [0.6, 0.1], false, 1e-12));
        assert!(polygon_meets_box(&tri, [0.1, 0.1], [0.2, 0.2], true, 1e-12));
        assert!(!polygon_meets_box(&tri, [0.3, 0.3], [0.4, 0.4], false, 1e-12));
    }

    #[test]
    fn rasterized_triangle_contains_its_points() {
        let tri = vec![[0.0, 0.0], [1.0, 0.0], [0.5, 3f64.sqrt() / 2.0]];
        let g = Region::Polygon(tri).rasterize(2, 6).unwrap();
        for i in 0..=40 {
            for j in 0..=40 {
                let (u, v) = (i as f64 / 40.0, j as f64 / 40.0);
                if u + v <= 1.0 {
                    let p = [u * 1.0 + v * 0.5, v * 3f64.sqrt() / 2.0];
                    assert!(g.contains_point(p), "{p:?}");
                }
            }
        }
    }
}
