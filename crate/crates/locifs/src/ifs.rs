//! The local IFS `(X_j, f_j)` and its set-level operations.
//!
//! The local Hutchinson–Barnsley operator is `F(B) = ⋃_j f_j(B ∩ X_j)`. The attractor
//! is computed as the decreasing chain `F^k(full space)`, which stabilizes at the
//! maximal invariant set of the discretized operator.
//!
//! Code words are past words `(b_{-k}, …, b_{-1})` with nonempty
//! `V = f_{b_{-1}} ∘ … ∘ f_{b_{-k}}(X_{b_{-k}})`, each map applied only to the part of
//! the running set inside its domain.

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::geometry::GeometryError;
use crate::space::Space;
use crate::symbolic::{walk_words, LanguageSample, Orientation, SymbolicError, TransitionMatrix, Word};

#[derive(Debug, Error)]
pub enum IfsError {
    #[error("a local IFS needs at least two maps, got {0}")]
    TooFewMaps(usize),
    #[error("{maps} maps but {domains} domains")]
    ShapeMismatch { maps: usize, domains: usize },
    #[error("domain {0} is empty")]
    EmptyDomain(usize),
    #[error("map {index} has Lipschitz constant {lambda}, not a contraction")]
    NotContraction { index: usize, lambda: f64 },
    #[error("map {0} sends its domain outside the ambient space")]
    OutOfSpace(usize),
    #[error("symbol {symbol} out of range for {maps} maps")]
    BadSymbol { symbol: u8, maps: usize },
    #[error("word must be nonempty")]
    EmptyWord,
    #[error("margin {zeta} does not exceed the resolution slack {slack}")]
    MarginTooSmall { zeta: f64, slack: f64 },
    #[error("attractor iteration did not converge after {} steps", .0.iterations)]
    NotConverged(Box<AttractorSummary>),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
}

/// Contractions with domains over a set backend.
#[derive(Debug, Clone)]
pub struct LocalIfs<S: Space> {
    space: S,
    maps: Vec<S::Map>,
    domains: Vec<S::Set>,
}

/// Result of the attractor iteration.
#[derive(Debug, Clone)]
pub struct AttractorReport<S: Space> {
    pub set: S::Set,
    pub summary: AttractorSummary,
}

/// Backend-independent part of an attractor report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AttractorSummary {
    pub iterations: usize,
    /// Hausdorff distance (with slack) between the last two iterates; 0 at an exact fixpoint.
    pub final_step: f64,
    pub converged: bool,
    pub exact_fixpoint: bool,
    /// `F^{k+1}(X) ⊆ F^k(X)` held at every step.
    pub nested: bool,
    /// Cells or cylinders per iterate, starting with the full space.
    pub sizes: Vec<usize>,
}

/// Classification of a pair in the Markov criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum MarkovEntry {
    Inside,
    Disjoint,
    Violation,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarkovReport {
    pub zeta: f64,
    /// `entries[i][j]` classifies `f_j(X_j)` against `X_i`.
    pub entries: Vec<Vec<MarkovEntry>>,
    pub passes: bool,
    pub matrix: TransitionMatrix,
    /// Depth to which `code_words = walk_words(M)` was checked (when the criterion passes).
    pub verified_depth: Option<usize>,
    pub code_equals_walk: Option<bool>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum OscVerdict {
    DisjointAtResolution,
    BoundaryTouching,
    FailsAtResolution,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OscReport {
    /// Size of each piece `f_j(X_j ∩ A)`.
    pub pieces: Vec<usize>,
    /// `(i, j, overlap)` for `i < j`.
    pub overlaps: Vec<(usize, usize, usize)>,
    pub verdict: OscVerdict,
}

impl OscReport {
    pub fn summary(&self) -> String {
        let total: usize = self.overlaps.iter().map(|t| t.2).sum();
        match self.verdict {
            OscVerdict::DisjointAtResolution => "disjoint at resolution".into(),
            OscVerdict::BoundaryTouching => format!("boundary-touching: overlap cells = {total}"),
            OscVerdict::FailsAtResolution => format!("fails at resolution: overlap cells = {total}"),
        }
    }
}

impl<S: Space> LocalIfs<S> {
    pub fn new(space: S, maps: Vec<S::Map>, domains: Vec<S::Set>) -> Result<Self, IfsError> {
        if maps.len() != domains.len() {
            return Err(IfsError::ShapeMismatch { maps: maps.len(), domains: domains.len() });
        }
        if maps.len() < 2 {
            return Err(IfsError::TooFewMaps(maps.len()));
        }
        for (j, (f, x)) in maps.iter().zip(&domains).enumerate() {
            if space.is_empty(x) {
                return Err(IfsError::EmptyDomain(j));
            }
            let lambda = space.lipschitz(f);
            if !(0.0..1.0).contains(&lambda) {
                return Err(IfsError::NotContraction { index: j, lambda });
            }
            if !space.maps_into_space(x, f) {
                return Err(IfsError::OutOfSpace(j));
            }
        }
        Ok(Self { space, maps, domains })
    }

    pub fn space(&self) -> &S {
        &self.space
    }

    pub fn len(&self) -> usize {
        self.maps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.maps.is_empty()
    }

    pub fn maps(&self) -> &[S::Map] {
        &self.maps
    }

    pub fn domains(&self) -> &[S::Set] {
        &self.domains
    }

    pub fn map(&self, j: usize) -> &S::Map {
        &self.maps[j]
    }

    pub fn domain(&self, j: usize) -> &S::Set {
        &self.domains[j]
    }

    /// Global contraction rate `max_j λ_j`.
    pub fn rate(&self) -> f64 {
        self.maps.iter().map(|f| self.space.lipschitz(f)).fold(0.0, f64::max)
    }

    fn check_symbols(&self, w: &[u8]) -> Result<(), IfsError> {
        if w.is_empty() {
            return Err(IfsError::EmptyWord);
        }
        match w.iter().find(|&&s| s as usize >= self.len()) {
            Some(&symbol) => Err(IfsError::BadSymbol { symbol, maps: self.len() }),
            None => Ok(()),
        }
    }

    /// `F(B) = ⋃_j f_j(B ∩ X_j)`.
    pub fn hutchinson_step(&self, b: &S::Set) -> S::Set {
        let parts: Vec<S::Set> = (0..self.len())
            .into_par_iter()
            .map(|j| {
                let part = self.space.intersect(b, &self.domains[j]);
                self.space.image(&part, &self.maps[j])
            })
            .collect();
        parts.iter().fold(self.space.empty(), |acc, p| self.space.union(&acc, p))
    }

    /// Iterates from the full space until a fixpoint, a Hausdorff step `<= tol`
    /// (when `tol > 0`), or `max_iter` steps.
    pub fn attractor(&self, max_iter: usize, tol: f64) -> Result<AttractorReport<S>, IfsError> {
        let sp = &self.space;
        let mut current = sp.full();
        let mut summary = AttractorSummary {
            iterations: 0,
            final_step: f64::INFINITY,
            converged: false,
            exact_fixpoint: false,
            nested: true,
            sizes: vec![sp.size(&current)],
        };
        for k in 1..=max_iter.max(1) {
            let next = self.hutchinson_step(&current);
            summary.iterations = k;
            summary.sizes.push(sp.size(&next));
            summary.nested &= sp.is_subset(&next, &current);
            if next == current {
                summary.final_step = 0.0;
                summary.converged = true;
                summary.exact_fixpoint = true;
                return Ok(AttractorReport { set: next, summary });
            }
            summary.final_step = sp.hausdorff(&current, &next).unwrap_or(f64::INFINITY);
            current = next;
            if tol > 0.0 && summary.final_step <= tol {
                summary.converged = true;
                return Ok(AttractorReport { set: current, summary });
            }
        }
        Err(IfsError::NotConverged(Box::new(summary)))
    }

    /// `V_w` for a past word `(b_{-k}, …, b_{-1})`.
    pub fn compose_image(&self, w: &[u8]) -> Result<S::Set, IfsError> {
        self.check_symbols(w)?;
        let sp = &self.space;
        let first = w[0] as usize;
        let mut v = sp.image(&self.domains[first], &self.maps[first]);
        for &s in &w[1..] {
            let s = s as usize;
            v = sp.image(&sp.intersect(&v, &self.domains[s]), &self.maps[s]);
        }
        Ok(v)
    }

    /// `V_w ≠ ∅` at resolution; `false` is a certificate.
    pub fn admissible(&self, w: &Word) -> Result<bool, IfsError> {
        Ok(!self.space.is_empty(&self.compose_image(w.symbols())?))
    }

    /// Admissible past words up to length `depth`, grown by appending the most recent
    /// symbol to admissible words only.
    pub fn code_words(&self, depth: usize) -> Result<LanguageSample, IfsError> {
        let n = self.len();
        let sp = &self.space;
        let branches: Vec<Vec<Vec<Vec<u8>>>> = (0..n)
            .into_par_iter()
            .map(|j| {
                let mut levels = vec![Vec::new(); depth + 1];
                if depth == 0 {
                    return levels;
                }
                let v = sp.image(&self.domains[j], &self.maps[j]);
                if sp.is_empty(&v) {
                    return levels;
                }
                let mut stack = vec![(vec![j as u8], v)];
                while let Some((w, v)) = stack.pop() {
                    let k = w.len();
                    if k < depth {
                        for s in (0..n).rev() {
                            let next = sp.image(&sp.intersect(&v, &self.domains[s]), &self.maps[s]);
                            if !sp.is_empty(&next) {
                                let mut c = w.clone();
                                c.push(s as u8);
                                stack.push((c, next));
                            }
                        }
                    }
                    levels[k].push(w);
                }
                levels
            })
            .collect();
        let mut levels = vec![Vec::new(); depth + 1];
        for branch in branches {
            for (k, words) in branch.into_iter().enumerate() {
                levels[k].extend(words);
            }
        }
        Ok(LanguageSample::from_levels(n, Orientation::Past, levels)?)
    }

    /// `m_ij = 1` iff `f_j(X_j) ∩ X_i ≠ ∅`.
    pub fn transition_matrix(&self) -> TransitionMatrix {
        let images: Vec<S::Set> = (0..self.len()).map(|j| self.space.image(&self.domains[j], &self.maps[j])).collect();
        TransitionMatrix::from_fn(self.len(), |i, j| !self.space.is_empty(&self.space.intersect(&images[j], &self.domains[i])))
            .expect("at least two maps")
    }

    /// Classifies every pair as `f_j(X_j)` inside `X_i` with margin `zeta`, at distance
    /// at least `zeta` from `X_i`, or neither. On a pass, checks the code words against
    /// the walks of the transition matrix to `depth`.
    pub fn markov_condition(&self, zeta: f64, depth: usize) -> Result<MarkovReport, IfsError> {
        let sp = &self.space;
        if zeta <= sp.slack() {
            return Err(IfsError::MarginTooSmall { zeta, slack: sp.slack() });
        }
        let n = self.len();
        let images: Vec<S::Set> = (0..n).map(|j| sp.image(&self.domains[j], &self.maps[j])).collect();
        let fat: Vec<S::Set> = images.iter().map(|a| sp.dilate(a, zeta)).collect();
        let entries: Vec<Vec<MarkovEntry>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        if sp.is_subset(&fat[j], &self.domains[i]) {
                            MarkovEntry::Inside
                        } else if sp.is_empty(&sp.intersect(&fat[j], &self.domains[i])) {
                            MarkovEntry::Disjoint
                        } else {
                            MarkovEntry::Violation
                        }
                    })
                    .collect()
            })
            .collect();
        let passes = entries.iter().flatten().all(|&e| e != MarkovEntry::Violation);
        let matrix = self.transition_matrix();
        let (verified_depth, code_equals_walk) = if passes && depth > 0 {
            let code = self.code_words(depth)?;
            let walk = walk_words(&matrix, depth)?;
            (Some(depth), Some(code == walk))
        } else {
            (None, None)
        };
        Ok(MarkovReport { zeta, entries, passes, matrix, verified_depth, code_equals_walk })
    }

    /// `I_N(a) = X_{a_0} ∩ f_{a_0}^{-1}(X_{a_1} ∩ f_{a_1}^{-1}(… X_{a_{N-1}}))` for a
    /// future word `a` of length `N`.
    pub fn orbit_domain(&self, a: &[u8]) -> Result<S::Set, IfsError> {
        self.check_symbols(a)?;
        let sp = &self.space;
        let last = *a.last().expect("nonempty") as usize;
        let mut s = self.domains[last].clone();
        for &t in a[..a.len() - 1].iter().rev() {
            let t = t as usize;
            s = sp.preimage(&s, &self.maps[t], &self.domains[t]);
            if sp.is_empty(&s) {
                break;
            }
        }
        Ok(s)
    }

    /// Points with an admissible forward orbit of length `depth`.
    pub fn orbit_core(&self, depth: usize) -> S::Set {
        let sp = &self.space;
        let union_domains = self.domains.iter().fold(sp.empty(), |acc, x| sp.union(&acc, x));
        let mut d = union_domains;
        for _ in 1..depth {
            let parts: Vec<S::Set> = (0..self.len())
                .into_par_iter()
                .map(|j| sp.preimage(&d, &self.maps[j], &self.domains[j]))
                .collect();
            d = parts.iter().fold(sp.empty(), |acc, x| sp.union(&acc, x));
        }
        d
    }

    /// Depth-`depth` outer approximation of the points of the attractor with an infinite orbit.
    pub fn infinite_core(&self, attractor: &S::Set, depth: usize) -> S::Set {
        self.space.intersect(attractor, &self.orbit_core(depth))
    }

    /// Overlap of the pieces `f_j(X_j ∩ A)`.
    pub fn osc_probe(&self, attractor: &S::Set) -> OscReport {
        let sp = &self.space;
        let pieces: Vec<S::Set> = (0..self.len())
            .map(|j| sp.image(&sp.intersect(attractor, &self.domains[j]), &self.maps[j]))
            .collect();
        let sizes: Vec<usize> = pieces.iter().map(|p| sp.size(p)).collect();
        let mut overlaps = Vec::new();
        let mut verdict = OscVerdict::DisjointAtResolution;
        for i in 0..pieces.len() {
            for j in (i + 1)..pieces.len() {
                let c = sp.size(&sp.intersect(&pieces[i], &pieces[j]));
                overlaps.push((i, j, c));
                if c == 0 {
                    continue;
                }
                let smaller = sizes[i].min(sizes[j]).max(1);
                let touching = (c as f64) <= 0.05 * smaller as f64;
                verdict = match (verdict, touching) {
                    (OscVerdict::FailsAtResolution, _) | (_, false) => OscVerdict::FailsAtResolution,
                    _ => OscVerdict::BoundaryTouching,
                };
            }
        }
        OscReport { pieces: sizes, overlaps, verdict }
    }

    /// Same data with other maps (domains unchanged).
    pub fn with_maps(&self, maps: Vec<S::Map>) -> Result<Self, IfsError> {
        Self::new(self.space.clone(), maps, self.domains.clone())
    }
}
