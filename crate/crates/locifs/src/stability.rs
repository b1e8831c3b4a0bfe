//! Perturbations, the D-distance, combinatorial-stability probes, graph-directed
//! embeddings and parameter sweeps.
//!
//! The D-distance of two local IFSs with `n` domains is
//! `max_i dist_H(X_i, Y_i) + max_i d_S(f_i, g_i)`, where `d_S` is a Skorohod-type
//! distance taking an infimum over homeomorphisms `ζ: X_i → Y_i`. Only upper bounds are
//! computed, from the identity pairing (equal domains) or a pairing whose displacement
//! the caller declares.

use std::collections::BTreeSet;
use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::beta::{BetaError, BetaSystem};
use crate::geometry::{dist, AffineContraction, GeometryError, GridSet, Region};
use crate::ifs::{AttractorSummary, IfsError, LocalIfs};
use crate::scenarios;
use crate::space::{GridSpace, Space};
use crate::symbolic::{digits, LanguageSample, SymbolicError, TransitionMatrix};

/// Factor by which the sentinel `L` exceeds `3 diam(X)`.
const SENTINEL_FACTOR: f64 = 3.0 * (1.0 + 1.0 / 1048576.0);

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("{what}: expected {expected} entries, got {got}")]
    ShapeMismatch { what: &'static str, expected: usize, got: usize },
    #[error("deflating domain {0} empties it")]
    EmptyDomain(usize),
    #[error("cannot shift along axis {axis} in dimension {dim}")]
    BadAxis { axis: usize, dim: u8 },
    #[error("graph needs at least one vertex")]
    EmptyGraph,
    #[error("edge {edge} references vertex {vertex}, graph has {vertices}")]
    BadEdge { edge: usize, vertex: usize, vertices: usize },
    #[error("{vertices} vertex copies with gap {gap} do not fit at level {level}")]
    PackingOverflow { vertices: usize, gap: f64, level: u8 },
    #[error("fiber map {0} is not a planar map of the unit square into itself")]
    FiberEscape(usize),
    #[error("sweep needs at least one parameter value")]
    EmptyGrid,
    #[error("parameter {0} is outside the family's range")]
    BadParameter(f64),
    #[error(transparent)]
    Ifs(#[from] IfsError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Beta(#[from] BetaError),
}

/// How a pair of domains is matched in the D-distance bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum Pairing {
    /// A homeomorphism `ζ: X_i → Y_i` with `sup |ζ(x) − x| <= displacement` exists.
    Declared(f64),
    /// No pairing known; `d_S` falls back to the sentinel unless the domains are equal.
    Unknown,
}

/// Upper bound on the D-distance with its two terms.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DBound {
    pub domains: f64,
    pub maps: f64,
    pub total: f64,
    /// Indices whose `d_S` term is the sentinel `L`.
    pub sentinel: Vec<usize>,
}

/// Upper bound on `D(R, S)`. Equal domains use the identity pairing; unequal ones use
/// `pairings[i]` when declared and the sentinel `L = 3 diam(X) (1 + 2^-20)` otherwise.
pub fn d_distance_upper(r: &LocalIfs<GridSpace>, s: &LocalIfs<GridSpace>, pairings: Option<&[Pairing]>) -> Result<DBound, StabilityError> {
    let n = r.len();
    if s.len() != n {
        return Err(StabilityError::ShapeMismatch { what: "maps", expected: n, got: s.len() });
    }
    if let Some(p) = pairings {
        if p.len() != n {
            return Err(StabilityError::ShapeMismatch { what: "pairings", expected: n, got: p.len() });
        }
    }
    let sp = r.space();
    let sentinel_value = SENTINEL_FACTOR * sp.space_diameter();
    let mut bound = DBound { domains: 0.0, maps: 0.0, total: 0.0, sentinel: Vec::new() };
    for i in 0..n {
        let (x, y) = (r.domain(i), s.domain(i));
        let dh = if x == y { 0.0 } else { sp.hausdorff(x, y).unwrap_or(sentinel_value) };
        bound.domains = bound.domains.max(dh);
        let (f, g) = (r.map(i), s.map(i));
        let displacement = if x == y {
            Some(0.0)
        } else {
            match pairings.map(|p| p[i]) {
                Some(Pairing::Declared(d)) => Some(d),
                _ => None,
            }
        };
        let ds = match displacement {
            Some(d) => {
                let sup = sup_difference(f, g, &[x, y]);
                sup + d * (1.0 + f.lambda().max(g.lambda()))
            }
            None => {
                bound.sentinel.push(i);
                sentinel_value
            }
        };
        bound.maps = bound.maps.max(ds);
    }
    bound.total = bound.domains + bound.maps;
    Ok(bound)
}

/// `sup |f(x) − g(x)|` over the bounding boxes of the given sets. `f − g` is affine, so
/// the maximum over a box is attained at a corner.
fn sup_difference(f: &AffineContraction, g: &AffineContraction, sets: &[&GridSet]) -> f64 {
    let mut best: f64 = 0.0;
    for set in sets {
        if let Some((lo, hi)) = set.bounding_box() {
            for c in f.box_image(lo, hi).iter().zip(g.box_image(lo, hi).iter()) {
                best = best.max(dist(*c.0, *c.1));
            }
        }
    }
    best
}

/// Change applied to one domain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub enum DomainAction {
    Keep,
    Inflate(f64),
    Deflate(f64),
    /// Translate the domain cover along `axis` by whole cells, truncated toward zero.
    Shift { axis: usize, amount: f64 },
}

impl DomainAction {
    pub fn magnitude(&self) -> f64 {
        match *self {
            DomainAction::Keep => 0.0,
            DomainAction::Inflate(r) | DomainAction::Deflate(r) => r.abs(),
            DomainAction::Shift { amount, .. } => amount.abs(),
        }
    }
}

impl fmt::Display for DomainAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DomainAction::Keep => write!(f, "keep"),
            DomainAction::Inflate(r) => write!(f, "inflate({r:.6})"),
            DomainAction::Deflate(r) => write!(f, "deflate({r:.6})"),
            DomainAction::Shift { axis, amount } => write!(f, "shift(axis {axis}, {amount:.6})"),
        }
    }
}

/// Per-map translations and per-domain actions.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerturbationSpec {
    pub translations: Vec<[f64; 2]>,
    pub domains: Vec<DomainAction>,
    /// Seed this probe system was drawn from, if random.
    pub seed: Option<u64>,
}

impl PerturbationSpec {
    pub fn zero(n: usize) -> Self {
        Self { translations: vec![[0.0; 2]; n], domains: vec![DomainAction::Keep; n], seed: None }
    }

    /// `max |v_i| + 3 max |r_i|`, which dominates the D-distance bound of the perturbed
    /// system up to resolution slack.
    pub fn magnitude(&self) -> f64 {
        let v = self.translations.iter().map(|t| dist(*t, [0.0, 0.0])).fold(0.0, f64::max);
        let r = self.domains.iter().map(DomainAction::magnitude).fold(0.0, f64::max);
        v + 3.0 * r
    }

    /// A random spec of magnitude at most `radius`: translations of length at most
    /// `radius/2`, domain actions of size at most `radius/6`.
    pub fn random(n: usize, dim: u8, radius: f64, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let translations = (0..n)
            .map(|_| {
                let len = rng.random::<f64>() * radius / 2.0;
                if dim == 1 {
                    [if rng.random::<bool>() { len } else { -len }, 0.0]
                } else {
                    let a = rng.random::<f64>() * std::f64::consts::TAU;
                    [len * a.cos(), len * a.sin()]
                }
            })
            .collect();
        let domains = (0..n)
            .map(|_| {
                let r = rng.random::<f64>() * radius / 6.0;
                match rng.random_range(0..4) {
                    0 => DomainAction::Keep,
                    1 => DomainAction::Inflate(r),
                    2 => DomainAction::Deflate(r),
                    _ => DomainAction::Shift {
                        axis: rng.random_range(0..dim as usize),
                        amount: if rng.random::<bool>() { r } else { -r },
                    },
                }
            })
            .collect();
        Self { translations, domains, seed: Some(seed) }
    }
}

impl fmt::Display for PerturbationSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(s) = self.seed {
            write!(f, "seed {s}: ")?;
        }
        for (i, (v, d)) in self.translations.iter().zip(&self.domains).enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "f{i} += ({:.6}, {:.6}), X{i} {d}", v[0], v[1])?;
        }
        Ok(())
    }
}

/// Translates the cover by whole cells; cells leaving the grid are dropped.
fn shift_cells(set: &GridSet, axis: usize, cells: i64) -> GridSet {
    let mut out = GridSet::empty(set.dim(), set.level()).expect("valid grid");
    let (w, h) = (set.side() as i64, set.rows() as i64);
    for (x, y) in set.cells() {
        let (mut nx, mut ny) = (x as i64, y as i64);
        if axis == 0 {
            nx += cells;
        } else {
            ny += cells;
        }
        if (0..w).contains(&nx) && (0..h).contains(&ny) {
            out.insert_cell(nx as usize, ny as usize);
        }
    }
    out
}

/// Applies `spec`; returns the new system and the pairings realizing each domain change.
pub fn perturb(r: &LocalIfs<GridSpace>, spec: &PerturbationSpec) -> Result<(LocalIfs<GridSpace>, Vec<Pairing>), StabilityError> {
    let n = r.len();
    if spec.translations.len() != n {
        return Err(StabilityError::ShapeMismatch { what: "translations", expected: n, got: spec.translations.len() });
    }
    if spec.domains.len() != n {
        return Err(StabilityError::ShapeMismatch { what: "domain actions", expected: n, got: spec.domains.len() });
    }
    let dim = r.space().dim;
    let mut maps = Vec::with_capacity(n);
    let mut domains = Vec::with_capacity(n);
    let mut pairings = Vec::with_capacity(n);
    for i in 0..n {
        let v = spec.translations[i];
        maps.push(if v == [0.0, 0.0] { r.map(i).clone() } else { r.map(i).translated(v) });
        let x = r.domain(i);
        let (y, disp) = match spec.domains[i] {
            DomainAction::Keep => (x.clone(), 0.0),
            DomainAction::Inflate(t) => (x.dilate(t.abs())?, t.abs()),
            DomainAction::Deflate(t) => {
                let y = x.erode(t.abs())?;
                if y.is_empty() {
                    return Err(StabilityError::EmptyDomain(i));
                }
                (y, t.abs())
            }
            DomainAction::Shift { axis, amount } => {
                if axis >= dim as usize {
                    return Err(StabilityError::BadAxis { axis, dim });
                }
                let cells = (amount / x.cell_size()).trunc() as i64;
                let y = shift_cells(x, axis, cells);
                if y.is_empty() {
                    return Err(StabilityError::EmptyDomain(i));
                }
                (y, cells.unsigned_abs() as f64 * x.cell_size())
            }
        };
        domains.push(y);
        pairings.push(Pairing::Declared(disp));
    }
    Ok((LocalIfs::new(*r.space(), maps, domains)?, pairings))
}

/// The first word (shortest, then lexicographic) in exactly one of two samples, and
/// whether it belongs to `a`.
pub fn first_difference(a: &LanguageSample, b: &LanguageSample) -> Option<(Vec<u8>, bool)> {
    let depth = a.depth().min(b.depth());
    for k in 1..=depth {
        let sa: BTreeSet<&Vec<u8>> = a.words(k).iter().collect();
        let sb: BTreeSet<&Vec<u8>> = b.words(k).iter().collect();
        if let Some(w) = sa.symmetric_difference(&sb).next() {
            return Some(((*w).clone(), sa.contains(w)));
        }
    }
    None
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub enum ProbeOutcome {
    Stable,
    Differs {
        sample: usize,
        word: Vec<u8>,
        /// The word is admissible for the base system (and not for the perturbation).
        in_base: bool,
        perturbation: String,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProbeReport {
    pub depth: usize,
    pub samples: usize,
    pub radius: f64,
    pub base_counts: Vec<usize>,
    pub outcome: ProbeOutcome,
    /// Every probed system had the base transition matrix.
    pub matrices_equal: bool,
    /// Largest D-distance bound among the probed systems.
    pub max_d_bound: f64,
}

impl ProbeReport {
    pub fn is_stable(&self) -> bool {
        self.outcome == ProbeOutcome::Stable
    }

    pub fn summary(&self) -> String {
        match &self.outcome {
            ProbeOutcome::Stable => format!(
                "STABLE to depth {} over {} samples (radius {}, max D bound {:.6})",
                self.depth, self.samples, self.radius, self.max_d_bound
            ),
            ProbeOutcome::Differs { sample, word, in_base, perturbation } => format!(
                "DIFFERS at sample {sample}: word {} is admissible only for the {} system; perturbation: {perturbation}",
                digits(word),
                if *in_base { "base" } else { "perturbed" }
            ),
        }
    }
}

/// Draws `samples` random perturbations of magnitude at most `radius` and compares their
/// code words to depth `depth` with those of `r`.
pub fn combinatorial_probe(r: &LocalIfs<GridSpace>, radius: f64, samples: usize, depth: usize, seed: u64) -> Result<ProbeReport, StabilityError> {
    let base = r.code_words(depth)?;
    let base_matrix = r.transition_matrix();
    let mut report = ProbeReport {
        depth,
        samples,
        radius,
        base_counts: base.counts(),
        outcome: ProbeOutcome::Stable,
        matrices_equal: true,
        max_d_bound: 0.0,
    };
    for k in 0..samples {
        let spec = if radius > 0.0 {
            PerturbationSpec::random(r.len(), r.space().dim, radius, seed.wrapping_add(k as u64))
        } else {
            PerturbationSpec::zero(r.len())
        };
        let (q, pairings) = perturb(r, &spec)?;
        let bound = d_distance_upper(r, &q, Some(&pairings))?;
        report.max_d_bound = report.max_d_bound.max(bound.total);
        report.matrices_equal &= q.transition_matrix() == base_matrix;
        if let Some((word, in_base)) = first_difference(&base, &q.code_words(depth)?) {
            report.outcome = ProbeOutcome::Differs { sample: k, word, in_base, perturbation: spec.to_string() };
            return Ok(report);
        }
    }
    Ok(report)
}

/// Compares code words of `base` with caller-supplied variants, such as the system of a
/// nearby parameter.
pub fn compare_code_spaces<S: Space>(base: &LocalIfs<S>, variants: &[(String, LocalIfs<S>)], depth: usize) -> Result<ProbeReport, StabilityError> {
    let words = base.code_words(depth)?;
    let base_matrix = base.transition_matrix();
    let mut report = ProbeReport {
        depth,
        samples: variants.len(),
        radius: f64::NAN,
        base_counts: words.counts(),
        outcome: ProbeOutcome::Stable,
        matrices_equal: true,
        max_d_bound: f64::NAN,
    };
    for (k, (label, q)) in variants.iter().enumerate() {
        report.matrices_equal &= q.transition_matrix() == base_matrix;
        if let Some((word, in_base)) = first_difference(&words, &q.code_words(depth)?) {
            report.outcome = ProbeOutcome::Differs { sample: k, word, in_base, perturbation: label.clone() };
            return Ok(report);
        }
    }
    Ok(report)
}

/// A directed multigraph; edge `e` runs from `i(e)` to `t(e)` as `(i, t)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DirectedGraph {
    vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl DirectedGraph {
    pub fn new(vertices: usize, edges: Vec<(usize, usize)>) -> Result<Self, StabilityError> {
        if vertices == 0 {
            return Err(StabilityError::EmptyGraph);
        }
        for (e, &(i, t)) in edges.iter().enumerate() {
            if let Some(&v) = [i, t].iter().find(|&&v| v >= vertices) {
                return Err(StabilityError::BadEdge { edge: e, vertex: v, vertices });
            }
        }
        Ok(Self { vertices, edges })
    }

    pub fn vertices(&self) -> usize {
        self.vertices
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// `e` may precede `e'` in a code word iff `t(e) = i(e')`.
    pub fn composability(&self) -> Result<TransitionMatrix, StabilityError> {
        Ok(TransitionMatrix::from_fn(self.edges.len(), |e, f| self.edges[e].1 == self.edges[f].0)?)
    }
}

/// A graph-directed IFS realized as a local IFS on disjoint copies of the fiber square.
#[derive(Debug, Clone)]
pub struct GdEmbedding {
    pub ifs: LocalIfs<GridSpace>,
    pub graph: DirectedGraph,
    /// Side of each vertex copy.
    pub scale: f64,
    pub gap: f64,
    /// Lower-left corner of each vertex copy.
    pub offsets: Vec<[f64; 2]>,
    /// Cover of each whole vertex copy.
    pub copies: Vec<GridSet>,
}

impl GdEmbedding {
    /// Margin for the Markov criterion: half the gap between copies.
    pub fn zeta(&self) -> f64 {
        self.gap / 2.0
    }

    /// `A ∩ copy_v` for each vertex.
    pub fn fiber_pieces(&self, attractor: &GridSet) -> Vec<GridSet> {
        let sp = self.ifs.space();
        self.copies.iter().map(|c| sp.intersect(attractor, c)).collect()
    }

    /// Hausdorff bound between `A_v` and `⋃_{i(e)=v} g_e(A_{t(e)} ∩ D_e)` per vertex;
    /// `0` when both sides are empty, infinite when exactly one is.
    pub fn fiber_equation_errors(&self, attractor: &GridSet) -> Vec<f64> {
        let sp = self.ifs.space();
        let pieces = self.fiber_pieces(attractor);
        (0..self.graph.vertices)
            .map(|v| {
                let rhs = self
                    .graph
                    .edges
                    .iter()
                    .enumerate()
                    .filter(|(_, &(i, _))| i == v)
                    .fold(sp.empty(), |acc, (e, &(_, t))| {
                        let piece = sp.intersect(&pieces[t], self.ifs.domain(e));
                        sp.union(&acc, &sp.image(&piece, self.ifs.map(e)))
                    });
                match (sp.is_empty(&pieces[v]), sp.is_empty(&rhs)) {
                    (true, true) => 0.0,
                    (false, false) => sp.hausdorff(&pieces[v], &rhs).expect("nonempty"),
                    _ => f64::INFINITY,
                }
            })
            .collect()
    }
}

fn place(region: &Region, s: f64, o: [f64; 2]) -> Region {
    let phi = |p: [f64; 2]| [s * p[0] + o[0], s * p[1] + o[1]];
    match region {
        Region::Full => Region::square(o, [o[0] + s, o[1] + s]),
        Region::Boxes(b) => Region::Boxes(b.iter().map(|&(lo, hi)| (phi(lo), phi(hi))).collect()),
        Region::Polygon(p) => Region::Polygon(p.iter().map(|&q| phi(q)).collect()),
    }
}

fn region_points(region: &Region) -> Vec<[f64; 2]> {
    match region {
        Region::Full => vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]],
        Region::Boxes(b) => b.iter().flat_map(|&(lo, hi)| [lo, [hi[0], lo[1]], [lo[0], hi[1]], hi]).collect(),
        Region::Polygon(p) => p.clone(),
    }
}

/// Packs the vertex fibers `[0,1]²` as a `k × k` array of squares of side
/// `s = (1 − (k+1) gap)/k`, `k = ⌈√|V|⌉`, and sets
/// `g_e(x) = φ_{i(e)}(f_e(φ_{t(e)}^{-1}(x)))` on `D_e = φ_{t(e)}(X_{t(e)})`.
pub fn graph_directed_embed(
    graph: &DirectedGraph,
    fibers: &[Region],
    maps: &[AffineContraction],
    level: u8,
    gap: f64,
) -> Result<GdEmbedding, StabilityError> {
    let nv = graph.vertices;
    if fibers.len() != nv {
        return Err(StabilityError::ShapeMismatch { what: "fiber domains", expected: nv, got: fibers.len() });
    }
    if maps.len() != graph.edges.len() {
        return Err(StabilityError::ShapeMismatch { what: "fiber maps", expected: graph.edges.len(), got: maps.len() });
    }
    let space = GridSpace::new(2, level)?;
    let k = (1..=nv).find(|k| k * k >= nv).expect("nv >= 1");
    let s = (1.0 - (k as f64 + 1.0) * gap) / k as f64;
    let cells_per_copy = s * (1u64 << level) as f64;
    if gap.is_nan() || gap <= 0.0 || s <= 0.0 || cells_per_copy < 4.0 || gap * ((1u64 << level) as f64) < 2.0 {
        return Err(StabilityError::PackingOverflow { vertices: nv, gap, level });
    }
    let offsets: Vec<[f64; 2]> = (0..nv)
        .map(|v| {
            let (col, row) = ((v % k) as f64, (v / k) as f64);
            [gap + col * (s + gap), gap + row * (s + gap)]
        })
        .collect();
    let mut g_maps = Vec::with_capacity(maps.len());
    let mut domains = Vec::with_capacity(maps.len());
    for (e, (&(i, t), f)) in graph.edges.iter().zip(maps).enumerate() {
        let inside = |p: [f64; 2]| (-1e-12..=1.0 + 1e-12).contains(&p[0]) && (-1e-12..=1.0 + 1e-12).contains(&p[1]);
        if f.dim() != 2 || !region_points(&fibers[t]).into_iter().all(|p| inside(f.apply(p))) {
            return Err(StabilityError::FiberEscape(e));
        }
        let a = f.linear();
        let (oi, ot) = (offsets[i], offsets[t]);
        let at = [a[0][0] * ot[0] + a[0][1] * ot[1], a[1][0] * ot[0] + a[1][1] * ot[1]];
        let b = f.translation();
        let shift = [s * b[0] + oi[0] - at[0], s * b[1] + oi[1] - at[1]];
        g_maps.push(AffineContraction::new(2, a, shift, f.lambda())?);
        domains.push(place(&fibers[t], s, ot).rasterize(2, level)?);
    }
    let copies = offsets
        .iter()
        .map(|&o| place(&Region::Full, s, o).rasterize(2, level))
        .collect::<Result<Vec<_>, _>>()?;
    let ifs = LocalIfs::new(space, g_maps, domains)?;
    Ok(GdEmbedding { ifs, graph: graph.clone(), scale: s, gap, offsets, copies })
}

/// Parametrized families of builtin systems.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Family {
    /// Parameter `β`: the third domain is cut at height `β`.
    Superfractal,
    /// Parameter `t`: the fourth domain is `[1−t, 1]²`.
    Nonsemicont,
    /// Parameter `β`: the β-derived system on `[0,1]`.
    Beta1d,
}

impl Family {
    pub fn name(self) -> &'static str {
        match self {
            Family::Superfractal => "superfractal",
            Family::Nonsemicont => "nonsemicont",
            Family::Beta1d => "beta1d",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s {
            "superfractal" => Some(Family::Superfractal),
            "nonsemicont" => Some(Family::Nonsemicont),
            "beta1d" => Some(Family::Beta1d),
            _ => None,
        }
    }

    pub fn build(self, param: f64, level: u8) -> Result<LocalIfs<GridSpace>, StabilityError> {
        match self {
            Family::Superfractal => Ok(scenarios::superfractal(param, level)?),
            Family::Nonsemicont => {
                if !(0.0..=1.0).contains(&param) {
                    return Err(StabilityError::BadParameter(param));
                }
                Ok(scenarios::nonsemicont(param, level)?)
            }
            Family::Beta1d => Ok(BetaSystem::from_f64(param)?.local_ifs(level)?),
        }
    }
}

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub family: Family,
    pub params: Vec<f64>,
    pub level: u8,
    pub max_iter: usize,
    pub tol: f64,
    /// One-sided Hausdorff jump flagged as a lower-semicontinuity failure.
    pub threshold: f64,
    /// Radius of the upper-semicontinuity inclusion test; 4 cell diagonals when `None`.
    pub usc_radius: Option<f64>,
}

impl SweepConfig {
    pub fn new(family: Family, params: Vec<f64>, level: u8) -> Self {
        Self { family, params, level, max_iter: 200, tol: 0.0, threshold: 0.15, usc_radius: None }
    }
}

#[derive(Debug, Clone)]
pub struct SweepEntry {
    pub param: f64,
    pub set: GridSet,
    pub summary: AttractorSummary,
}

/// Largest one-sided Hausdorff distance between attractors at adjacent parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Jump {
    pub lo: f64,
    pub hi: f64,
    /// `sup_{x ∈ A_hi} d(x, A_lo)` on cell centers.
    pub gained: f64,
    /// `sup_{x ∈ A_lo} d(x, A_hi)` on cell centers.
    pub lost: f64,
    /// Center of the cell realizing the larger of the two.
    pub witness: [f64; 2],
    pub flagged: bool,
}

impl Jump {
    pub fn size(&self) -> f64 {
        self.gained.max(self.lost)
    }
}

/// `A_lo ⊆ dilate(A_hi, radius)` for adjacent parameters `lo < hi`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UscCheck {
    pub lo: f64,
    pub hi: f64,
    pub radius: f64,
    pub holds: bool,
}

#[derive(Debug, Clone)]
pub struct SweepReport {
    pub family: Family,
    pub params: Vec<f64>,
    pub entries: Vec<SweepEntry>,
    /// Pairwise Hausdorff bounds; zero on the diagonal.
    pub matrix: Vec<Vec<f64>>,
    pub jumps: Vec<Jump>,
    pub usc: Vec<UscCheck>,
    pub slack: f64,
}

impl SweepReport {
    pub fn usc_holds(&self) -> bool {
        self.usc.iter().all(|u| u.holds)
    }

    pub fn flagged_jumps(&self) -> impl Iterator<Item = &Jump> {
        self.jumps.iter().filter(|j| j.flagged)
    }

    /// One row per parameter: cell count, iterations, convergence, distances.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("param,cells,iterations,converged");
        for p in &self.params {
            out.push_str(&format!(",d_{p}"));
        }
        out.push('\n');
        for (k, e) in self.entries.iter().enumerate() {
            out.push_str(&format!("{},{},{},{}", e.param, e.set.count(), e.summary.iterations, e.summary.converged));
            for d in &self.matrix[k] {
                out.push_str(&format!(",{d:.9}"));
            }
            out.push('\n');
        }
        out
    }

    pub fn jumps_csv(&self) -> String {
        let mut out = String::from("lo,hi,gained,lost,witness_x,witness_y,flagged,usc_holds\n");
        for (j, u) in self.jumps.iter().zip(&self.usc) {
            out.push_str(&format!(
                "{},{},{:.9},{:.9},{:.9},{:.9},{},{}\n",
                j.lo, j.hi, j.gained, j.lost, j.witness[0], j.witness[1], j.flagged, u.holds
            ));
        }
        out
    }

    pub fn summary(&self) -> String {
        let mut s = format!("family {} over {} parameters, slack {:.6}\n", self.family.name(), self.params.len(), self.slack);
        for j in &self.jumps {
            s.push_str(&format!(
                "{} -> {}: jump {:.6} at ({:.4}, {:.4}){}\n",
                j.lo,
                j.hi,
                j.size(),
                j.witness[0],
                j.witness[1],
                if j.flagged { "  LSC FAILURE" } else { "" }
            ));
        }
        s.push_str(&format!("usc inclusions: {}\n", if self.usc_holds() { "hold" } else { "FAIL" }));
        s
    }
}

/// Attractors over a parameter grid, their pairwise distances, jumps between adjacent
/// parameters and upper-semicontinuity inclusions. Parameters are sorted first.
pub fn family_sweep(cfg: &SweepConfig) -> Result<SweepReport, StabilityError> {
    if cfg.params.is_empty() {
        return Err(StabilityError::EmptyGrid);
    }
    let mut params = cfg.params.clone();
    params.sort_by(f64::total_cmp);
    params.dedup();
    let entries: Vec<SweepEntry> = params
        .par_iter()
        .map(|&p| {
            let ifs = cfg.family.build(p, cfg.level)?;
            let rep = ifs.attractor(cfg.max_iter, cfg.tol)?;
            Ok(SweepEntry { param: p, set: rep.set, summary: rep.summary })
        })
        .collect::<Result<_, StabilityError>>()?;
    let slack = entries[0].set.cell_diagonal();
    let n = entries.len();
    let mut matrix = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let d = hausdorff_or_inf(&entries[i].set, &entries[j].set)?;
            matrix[i][j] = d;
            matrix[j][i] = d;
        }
    }
    let radius = cfg.usc_radius.unwrap_or(4.0 * slack);
    let mut jumps = Vec::new();
    let mut usc = Vec::new();
    for w in entries.windows(2) {
        let (lo, hi) = (&w[0], &w[1]);
        let (gained, at_g) = directed_or_inf(&hi.set, &lo.set)?;
        let (lost, at_l) = directed_or_inf(&lo.set, &hi.set)?;
        let witness = if gained >= lost { at_g } else { at_l };
        jumps.push(Jump { lo: lo.param, hi: hi.param, gained, lost, witness, flagged: gained.max(lost) >= cfg.threshold });
        let holds = lo.set.is_empty() || (!hi.set.is_empty() && lo.set.is_subset(&hi.set.dilate(radius)?)?);
        usc.push(UscCheck { lo: lo.param, hi: hi.param, radius, holds });
    }
    Ok(SweepReport { family: cfg.family, params, entries, matrix, jumps, usc, slack })
}

fn hausdorff_or_inf(a: &GridSet, b: &GridSet) -> Result<f64, GeometryError> {
    match (a.is_empty(), b.is_empty()) {
        (true, true) => Ok(0.0),
        (false, false) => a.hausdorff_distance(b),
        _ => Ok(f64::INFINITY),
    }
}

fn directed_or_inf(a: &GridSet, b: &GridSet) -> Result<(f64, [f64; 2]), GeometryError> {
    if a.is_empty() {
        return Ok((0.0, [f64::NAN; 2]));
    }
    if b.is_empty() {
        return Ok((f64::INFINITY, [f64::NAN; 2]));
    }
    let (d, (x, y)) = a.directed_distance(b)?;
    Ok((d, a.cell_center(x, y)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn square_ifs(level: u8) -> LocalIfs<GridSpace> {
        scenarios::markov2(level).unwrap()
    }

    #[test]
    fn identical_systems_have_zero_bound() {
        let r = square_ifs(7);
        let b = d_distance_upper(&r, &r, None).unwrap();
        assert_eq!(b.total, 0.0);
        assert!(b.sentinel.is_empty());
    }

    #[test]
    fn translation_bound_is_the_shift_length() {
        let r = square_ifs(7);
        let mut spec = PerturbationSpec::zero(2);
        spec.translations = vec![[0.03, 0.04], [0.0, -0.02]];
        let (q, _) = perturb(&r, &spec).unwrap();
        let b = d_distance_upper(&r, &q, None).unwrap();
        assert!((b.total - 0.05).abs() < 1e-12, "{b:?}");
    }

    #[test]
    fn unpaired_unequal_domains_use_sentinel() {
        let r = square_ifs(7);
        let mut spec = PerturbationSpec::zero(2);
        spec.domains[1] = DomainAction::Inflate(0.05);
        let (q, _) = perturb(&r, &spec).unwrap();
        let b = d_distance_upper(&r, &q, None).unwrap();
        assert_eq!(b.sentinel, vec![1]);
        assert!(b.maps > 3.0 * 2f64.sqrt());
    }

    #[test]
    fn zero_spec_is_identity() {
        let r = square_ifs(7);
        let (q, _) = perturb(&r, &PerturbationSpec::zero(2)).unwrap();
        assert_eq!(q.domains(), r.domains());
        assert_eq!(q.maps(), r.maps());
    }

    #[test]
    fn deflating_past_width_fails() {
        let r = scenarios::nonsemicont(0.1, 7).unwrap();
        let mut spec = PerturbationSpec::zero(4);
        spec.domains[3] = DomainAction::Deflate(0.2);
        assert!(matches!(perturb(&r, &spec), Err(StabilityError::EmptyDomain(3))));
    }

    #[test]
    fn inflation_moves_domains_by_at_most_r_plus_slack() {
        let r = square_ifs(8);
        let mut spec = PerturbationSpec::zero(2);
        spec.domains[1] = DomainAction::Inflate(0.05);
        let (q, _) = perturb(&r, &spec).unwrap();
        let d = q.space().hausdorff(r.domain(1), q.domain(1)).unwrap();
        assert!(d <= 0.05 + 2.0 * q.space().slack(), "{d}");
    }

    #[test]
    fn zero_radius_probe_is_stable() {
        let r = square_ifs(7);
        let p = combinatorial_probe(&r, 0.0, 3, 6, 1).unwrap();
        assert!(p.is_stable());
        assert!(p.matrices_equal);
    }

    #[test]
    fn two_cycle_matrix() {
        let g = DirectedGraph::new(2, vec![(0, 1), (1, 0)]).unwrap();
        let m = g.composability().unwrap();
        assert_eq!(m.rows(), &[vec![false, true], vec![true, false]]);
        let gd = scenarios::gd_2cycle(8).unwrap();
        assert_eq!(gd.ifs.transition_matrix(), m);
    }

    #[test]
    fn single_vertex_embedding_is_ordinary_ifs() {
        let g = DirectedGraph::new(1, vec![(0, 0), (0, 0)]).unwrap();
        let maps = [AffineContraction::similarity(0.4, [0.0, 0.0]).unwrap(), AffineContraction::similarity(0.4, [0.6, 0.6]).unwrap()];
        let gd = graph_directed_embed(&g, &[Region::Full], &maps, 8, 0.05).unwrap();
        assert_eq!(gd.ifs.transition_matrix(), TransitionMatrix::all_ones(2).unwrap());
        assert_eq!(gd.ifs.domain(0), gd.ifs.domain(1));
        let a = gd.ifs.attractor(100, 0.0).unwrap().set;
        assert!(gd.fiber_equation_errors(&a)[0] <= 3.0 * a.cell_diagonal());
    }

    #[test]
    fn packing_overflow_detected() {
        let g = DirectedGraph::new(30, (0..30).map(|v| (v, (v + 1) % 30)).collect()).unwrap();
        let maps = vec![AffineContraction::similarity(0.5, [0.25, 0.25]).unwrap(); 30];
        let fibers = vec![Region::Full; 30];
        assert!(matches!(graph_directed_embed(&g, &fibers, &maps, 5, 0.02), Err(StabilityError::PackingOverflow { .. })));
    }

    #[test]
    fn bad_edge_rejected() {
        assert!(matches!(DirectedGraph::new(2, vec![(0, 2)]), Err(StabilityError::BadEdge { vertex: 2, .. })));
    }

    #[test]
    fn one_parameter_sweep_has_zero_matrix() {
        let cfg = SweepConfig::new(Family::Superfractal, vec![1.0], 6);
        let r = family_sweep(&cfg).unwrap();
        assert_eq!(r.matrix, vec![vec![0.0]]);
        assert!(r.jumps.is_empty());
    }

    #[test]
    fn first_difference_prefers_short_words() {
        let a = LanguageSample::full_shift(2, 3).unwrap();
        let b = LanguageSample::grow(2, crate::symbolic::Orientation::Past, 3, |w| !w.windows(2).any(|p| p == [1, 1])).unwrap();
        assert_eq!(first_difference(&a, &b), Some((vec![1, 1], true)));
        assert_eq!(first_difference(&a, &a), None);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(24))]

        #[test]
        fn perturbation_bound_dominated_by_magnitude(seed in any::<u64>(), radius in 0.0f64..0.06) {
            let r = square_ifs(7);
            let spec = PerturbationSpec::random(2, 2, radius, seed);
            prop_assert!(spec.magnitude() <= radius + 1e-12);
            let (q, pairings) = perturb(&r, &spec).unwrap();
            let b = d_distance_upper(&r, &q, Some(&pairings)).unwrap();
            prop_assert!(b.total <= spec.magnitude() + 2.0 * r.space().slack() + 1e-12, "{} vs {}", b.total, spec.magnitude());
        }

        #[test]
        fn stable_probe_keeps_matrix(seed in 0u64..1000) {
            let r = square_ifs(7);
            let p = combinatorial_probe(&r, scenarios::MARKOV2_ZETA / 3.0, 2, 5, seed).unwrap();
            prop_assert!(!p.is_stable() || p.matrices_equal);
        }
    }
}
