//! Sequence space `{0, …, n-1}^ℕ` with the metric `d(x, y) = 2^-N`, `N` the first
//! (1-based) index where `x` and `y` differ.
//!
//! Sets are finite unions of cylinders `[w]` with `|w| <= W` (the window). A
//! [`CylinderSet`] is kept in canonical form: sorted, no cylinder contained in another,
//! and no complete family of siblings (those are merged into their parent). Points
//! are finite symbol vectors followed by an implicit tail of zeros.

use std::cmp::Ordering;

use super::SymbolicError;

/// Canonical finite union of cylinders.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CylinderSet {
    alphabet: u8,
    window: u8,
    words: Vec<Vec<u8>>,
}

/// A point with finite support.
pub type SeqPoint = Vec<u8>;

/// Symbol at 0-based position `i` of a finitely supported point.
#[inline]
pub fn symbol_at(x: &[u8], i: usize) -> u8 {
    x.get(i).copied().unwrap_or(0)
}

/// `d(x, y)` for finitely supported points.
pub fn seq_distance(x: &[u8], y: &[u8]) -> f64 {
    let n = x.len().max(y.len());
    (0..n)
        .find(|&i| symbol_at(x, i) != symbol_at(y, i))
        .map_or(0.0, |i| 0.5f64.powi(i as i32 + 1))
}

/// Number of leading symbols two points must share to be at distance `< r`.
pub fn strict_ball_prefix(r: f64) -> usize {
    if r > 1.0 {
        0
    } else {
        (1.0 / r).log2().floor().max(0.0) as usize
    }
}

fn common_prefix(a: &[u8], b: &[u8]) -> usize {
    a.iter().zip(b).take_while(|(x, y)| x == y).count()
}

impl CylinderSet {
    pub fn empty(alphabet: u8, window: u8) -> Self {
        Self { alphabet, window, words: Vec::new() }
    }

    pub fn full(alphabet: u8, window: u8) -> Self {
        Self { alphabet, window, words: vec![Vec::new()] }
    }

    /// Canonical union of the given cylinders (longer words are cut to the window).
    pub fn from_words(alphabet: u8, window: u8, words: impl IntoIterator<Item = Vec<u8>>) -> Result<Self, SymbolicError> {
        let mut list: Vec<Vec<u8>> = Vec::new();
        for mut w in words {
            if let Some(&symbol) = w.iter().find(|&&s| s >= alphabet) {
                return Err(SymbolicError::InvalidSymbol { symbol, alphabet: alphabet as usize });
            }
            w.truncate(window as usize);
            list.push(w);
        }
        Ok(Self::normalized(alphabet, window, list))
    }

    /// All cylinders of length `min(window, depth)` over a sub-alphabet: the outer cover
    /// of the full shift on `symbols`.
    pub fn subshift(alphabet: u8, window: u8, symbols: &[u8]) -> Result<Self, SymbolicError> {
        let mut syms: Vec<u8> = symbols.to_vec();
        syms.sort_unstable();
        syms.dedup();
        if let Some(&symbol) = syms.iter().find(|&&s| s >= alphabet) {
            return Err(SymbolicError::InvalidSymbol { symbol, alphabet: alphabet as usize });
        }
        if syms.len() == alphabet as usize {
            return Ok(Self::full(alphabet, window));
        }
        let mut words: Vec<Vec<u8>> = vec![Vec::new()];
        for _ in 0..window {
            words = words
                .iter()
                .flat_map(|w| {
                    syms.iter().map(move |&s| {
                        let mut c = w.clone();
                        c.push(s);
                        c
                    })
                })
                .collect();
        }
        Ok(Self { alphabet, window, words })
    }

    fn normalized(alphabet: u8, window: u8, mut list: Vec<Vec<u8>>) -> Self {
        list.sort_unstable();
        list.dedup();
        let mut stack: Vec<Vec<u8>> = Vec::with_capacity(list.len());
        for w in list {
            if let Some(last) = stack.last() {
                if w.starts_with(last) {
                    continue;
                }
            }
            stack.push(w);
            // Merge complete sibling families into their parent.
            loop {
                let n = alphabet as usize;
                let Some(top) = stack.last() else { break };
                if top.is_empty() || stack.len() < n || top[top.len() - 1] as usize != n - 1 {
                    break;
                }
                let parent = &top[..top.len() - 1];
                let base = stack.len() - n;
                let complete = (0..n).all(|s| {
                    let c = &stack[base + s];
                    c.len() == top.len() && c.starts_with(parent) && c[c.len() - 1] as usize == s
                });
                if !complete {
                    break;
                }
                let parent = parent.to_vec();
                stack.truncate(base);
                stack.push(parent);
            }
        }
        Self { alphabet, window, words: stack }
    }

    pub fn alphabet(&self) -> u8 {
        self.alphabet
    }

    pub fn window(&self) -> u8 {
        self.window
    }

    pub fn words(&self) -> &[Vec<u8>] {
        &self.words
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// Index of the element that is a prefix of `w`, if any.
    fn prefix_of(&self, w: &[u8]) -> Option<usize> {
        let i = self.words.partition_point(|x| x.as_slice() <= w);
        (i > 0 && w.starts_with(&self.words[i - 1])).then(|| i - 1)
    }

    /// True when some element strictly or weakly extends `w`.
    fn has_extension(&self, w: &[u8]) -> bool {
        let i = self.words.partition_point(|x| x.as_slice() < w);
        i < self.words.len() && self.words[i].starts_with(w)
    }

    /// `[w] ⊆ self`.
    pub fn covers(&self, w: &[u8]) -> bool {
        self.prefix_of(w).is_some()
    }

    /// `[w] ∩ self ≠ ∅`.
    pub fn meets(&self, w: &[u8]) -> bool {
        self.covers(w) || self.has_extension(w)
    }

    pub fn contains_point(&self, x: &[u8]) -> bool {
        let probe: Vec<u8> = (0..self.window as usize).map(|i| symbol_at(x, i)).collect();
        self.covers(&probe)
    }

    pub fn union(&self, other: &Self) -> Self {
        let list = self.words.iter().chain(&other.words).cloned().collect();
        Self::normalized(self.alphabet, self.window, list)
    }

    pub fn intersect(&self, other: &Self) -> Self {
        let (a, b) = (&self.words, &other.words);
        let (mut i, mut j) = (0, 0);
        let mut out = Vec::new();
        while i < a.len() && j < b.len() {
            if b[j].starts_with(&a[i]) {
                out.push(b[j].clone());
                j += 1;
            } else if a[i].starts_with(&b[j]) {
                out.push(a[i].clone());
                i += 1;
            } else if a[i] < b[j] {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::normalized(self.alphabet, self.window, out)
    }

    pub fn is_subset(&self, other: &Self) -> bool {
        self.words.iter().all(|w| other.covers(w))
    }

    /// Every cylinder cut to at most `len` symbols.
    pub fn truncated(&self, len: usize) -> Self {
        let list = self.words.iter().map(|w| w[..w.len().min(len)].to_vec()).collect();
        Self::normalized(self.alphabet, self.window, list)
    }

    /// Closed `r`-neighbourhood.
    pub fn dilate(&self, r: f64) -> Self {
        if r <= 0.0 || self.is_empty() {
            return self.clone();
        }
        // d(x, y) <= r  iff  x and y agree on the first ceil(log2(1/r)) - 1 symbols.
        let keep = ((1.0 / r).log2().ceil() - 1.0).max(0.0) as usize;
        self.truncated(keep)
    }

    /// Diameter of the union (0 when empty).
    pub fn diameter(&self) -> f64 {
        match self.words.as_slice() {
            [] => 0.0,
            [w] => 0.5f64.powi(w.len() as i32 + 1),
            [first, .., last] => 0.5f64.powi(common_prefix(first, last) as i32 + 1),
        }
    }

    /// Exact `inf_{y ∈ self} d(x, y)`.
    pub fn distance_to_point(&self, x: &[u8]) -> Option<f64> {
        if self.is_empty() {
            return None;
        }
        let probe: Vec<u8> = (0..self.window as usize).map(|i| symbol_at(x, i)).collect();
        if self.covers(&probe) {
            return Some(0.0);
        }
        let i = self.words.partition_point(|w| w.as_slice() < probe.as_slice());
        let mut best = 0;
        for k in [i.wrapping_sub(1), i] {
            if let Some(w) = self.words.get(k) {
                best = best.max(common_prefix(w, &probe));
            }
        }
        Some(0.5f64.powi(best as i32 + 1))
    }

    /// `sup_{x ∈ [w]} inf_{y ∈ self} d(x, y)`.
    fn directed_from_cylinder(&self, w: &[u8]) -> f64 {
        if self.covers(w) {
            return 0.0;
        }
        if !self.has_extension(w) {
            let i = self.words.partition_point(|x| x.as_slice() < w);
            let mut best = 0;
            for k in [i.wrapping_sub(1), i] {
                if let Some(x) = self.words.get(k) {
                    best = best.max(common_prefix(x, w));
                }
            }
            return 0.5f64.powi(best as i32 + 1);
        }
        let mut worst: f64 = 0.0;
        let mut child = w.to_vec();
        child.push(0);
        for s in 0..self.alphabet {
            *child.last_mut().expect("nonempty") = s;
            let d = if self.meets(&child) {
                self.directed_from_cylinder(&child)
            } else {
                0.5f64.powi(w.len() as i32 + 1)
            };
            worst = worst.max(d);
        }
        worst
    }

    /// `sup_{x ∈ self} inf_{y ∈ other} d(x, y)` for the represented unions.
    pub fn directed_distance(&self, other: &Self) -> f64 {
        self.words.iter().map(|w| other.directed_from_cylinder(w)).fold(0.0, f64::max)
    }

    /// Canonical point of each cylinder closest to `x`: the cylinder word followed by
    /// the tail of `x`.
    pub fn representatives(&self, x: &[u8]) -> Vec<SeqPoint> {
        self.words
            .iter()
            .map(|w| {
                let mut p = w.clone();
                p.extend(x.iter().skip(w.len()));
                trim(p)
            })
            .collect()
    }
}

/// Drops trailing zeros so equal points compare equal.
pub fn trim(mut p: SeqPoint) -> SeqPoint {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

/// A continuous map of sequence space defined by a finite rule.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SymbolicMap {
    /// `x -> (s, x_1, x_2, …)`.
    Prepend(u8),
    /// `x -> (p_1, …, p_k, y_1, y_2, …)` with `y_i = Σ_j c_j x_{i+j}` evaluated in ℤ.
    Window { prefix: Vec<u8>, coefficients: Vec<u8> },
}

impl SymbolicMap {
    pub fn window(prefix: Vec<u8>, coefficients: Vec<u8>) -> Result<Self, SymbolicError> {
        if coefficients.is_empty() || prefix.len() < coefficients.len() {
            return Err(SymbolicError::BadLevel(prefix.len()));
        }
        Ok(SymbolicMap::Window { prefix, coefficients })
    }

    /// Lipschitz constant in the `2^-N` metric.
    pub fn lipschitz(&self) -> f64 {
        match self {
            SymbolicMap::Prepend(_) => 0.5,
            SymbolicMap::Window { prefix, coefficients } => 0.5f64.powi((prefix.len() + 1 - coefficients.len()) as i32),
        }
    }

    /// Image of a finitely supported point, or `None` when a symbol leaves the alphabet.
    pub fn apply(&self, x: &[u8], alphabet: u8) -> Option<SeqPoint> {
        let out = match self {
            SymbolicMap::Prepend(s) => {
                let mut p = Vec::with_capacity(x.len() + 1);
                p.push(*s);
                p.extend_from_slice(x);
                p
            }
            SymbolicMap::Window { prefix, coefficients } => {
                let mut p = prefix.clone();
                for i in 0..x.len() {
                    p.push(window_sum(coefficients, x, i)?);
                }
                p
            }
        };
        out.iter().all(|&s| s < alphabet).then(|| trim(out))
    }

    /// Symbols of the image known from the first `w.len()` input symbols, or `None`
    /// when one of them already leaves the alphabet.
    pub fn image_prefix(&self, w: &[u8], alphabet: u8) -> Option<Vec<u8>> {
        let out = match self {
            SymbolicMap::Prepend(s) => {
                let mut p = Vec::with_capacity(w.len() + 1);
                p.push(*s);
                p.extend_from_slice(w);
                p
            }
            SymbolicMap::Window { prefix, coefficients } => {
                let r = coefficients.len();
                let mut p = prefix.clone();
                if w.len() >= r {
                    for i in 0..=(w.len() - r) {
                        p.push(window_sum(coefficients, w, i)?);
                    }
                }
                p
            }
        };
        out.iter().all(|&s| s < alphabet).then_some(out)
    }
}

fn window_sum(coefficients: &[u8], x: &[u8], i: usize) -> Option<u8> {
    let mut total = 0u32;
    for (j, &c) in coefficients.iter().enumerate() {
        total += c as u32 * symbol_at(x, i + j) as u32;
    }
    u8::try_from(total).ok()
}

impl CylinderSet {
    /// Outer cover of `f(self)`.
    pub fn image(&self, f: &SymbolicMap) -> Self {
        let list = self
            .words
            .iter()
            .filter_map(|w| f.image_prefix(w, self.alphabet))
            .map(|mut p| {
                p.truncate(self.window as usize);
                p
            })
            .collect();
        Self::normalized(self.alphabet, self.window, list)
    }

    /// Outer cover of `{x ∈ domain : f(x) ∈ self}`, refining domain cylinders until
    /// their image prefix is decided or the window is reached.
    pub fn preimage(&self, f: &SymbolicMap, domain: &Self) -> Self {
        let mut out = Vec::new();
        if !self.is_empty() {
            for w in &domain.words {
                self.collect_preimage(f, w.clone(), &mut out);
            }
        }
        Self::normalized(self.alphabet, self.window, out)
    }

    fn collect_preimage(&self, f: &SymbolicMap, w: Vec<u8>, out: &mut Vec<Vec<u8>>) {
        let Some(mut p) = f.image_prefix(&w, self.alphabet) else { return };
        p.truncate(self.window as usize);
        if self.covers(&p) {
            out.push(w);
            return;
        }
        if !self.has_extension(&p) {
            return;
        }
        if w.len() >= self.window as usize {
            out.push(w);
            return;
        }
        for s in 0..self.alphabet {
            let mut c = w.clone();
            c.push(s);
            self.collect_preimage(f, c, out);
        }
    }
}

impl PartialOrd for CylinderSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        match (self.is_subset(other), other.is_subset(self)) {
            (true, true) => Some(Ordering::Equal),
            (true, false) => Some(Ordering::Less),
            (false, true) => Some(Ordering::Greater),
            (false, false) => None,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(words: &[&[u8]]) -> CylinderSet {
        CylinderSet::from_words(3, 8, words.iter().map(|w| w.to_vec())).unwrap()
    }

    #[test]
    fn canonical_form_merges_siblings() {
        let s = set(&[&[0, 0], &[0, 1], &[0, 2], &[1]]);
        assert_eq!(s.words(), &[vec![0], vec![1]]);
        let t = set(&[&[0], &[0, 1, 1], &[1], &[2]]);
        assert_eq!(t, CylinderSet::full(3, 8));
    }

    #[test]
    fn intersection_and_subset() {
        let a = set(&[&[0], &[1, 2]]);
        let b = set(&[&[0, 1], &[1]]);
        assert_eq!(a.intersect(&b).words(), &[vec![0, 1], vec![1, 2]]);
        assert!(a.intersect(&b).is_subset(&a));
        assert!(!a.is_subset(&b));
        assert!(set(&[&[2]]).intersect(&a).is_empty());
    }

    #[test]
    fn distances() {
        assert_eq!(seq_distance(&[0, 1], &[0, 1, 0, 0]), 0.0);
        assert_eq!(seq_distance(&[0, 1], &[0, 0]), 0.25);
        let zero_core = set(&[&[0, 0, 0, 0]]);
        assert_eq!(zero_core.distance_to_point(&[0, 1]), Some(0.25));
        assert_eq!(zero_core.distance_to_point(&[0, 0, 0, 0, 2]), Some(0.0));
        assert_eq!(strict_ball_prefix(0.25), 2);
        assert_eq!(strict_ball_prefix(0.3), 1);
    }

    #[test]
    fn directed_distance_by_descent() {
        let a = set(&[&[0]]);
        let b = set(&[&[0, 1]]);
        // Points of [0] starting 00 or 02 sit at distance 1/4 from [01].
        assert_eq!(a.directed_distance(&b), 0.25);
        assert_eq!(b.directed_distance(&a), 0.0);
        let c = set(&[&[2, 2, 2]]);
        assert_eq!(a.directed_distance(&c), 0.5);
    }

    #[test]
    fn dilation_truncates() {
        let a = set(&[&[0, 1, 2, 0]]);
        assert_eq!(a.dilate(0.25).words(), &[vec![0]]);
        assert_eq!(a.dilate(0.2).words(), &[vec![0, 1]]);
        assert_eq!(a.dilate(0.0), a);
        assert_eq!(a.dilate(0.6), CylinderSet::full(3, 8));
    }

    #[test]
    fn window_rule_matches_example_map() {
        let f2 = SymbolicMap::window(vec![0, 0], vec![1, 1]).unwrap();
        assert_eq!(f2.apply(&[0, 1], 3), Some(vec![0, 0, 1, 1]));
        assert_eq!(f2.apply(&[1, 1], 3), Some(vec![0, 0, 2, 1]));
        assert_eq!(f2.apply(&[0, 1, 1], 3), Some(vec![0, 0, 1, 2, 1]));
        assert_eq!(f2.apply(&[2, 1], 3), None);
        assert_eq!(f2.lipschitz(), 0.5);
        assert_eq!(f2.image_prefix(&[1, 0, 1], 3), Some(vec![0, 0, 1, 1]));
    }

    #[test]
    fn preimage_of_prepend_and_window() {
        let full = CylinderSet::full(3, 8);
        let target = set(&[&[1, 2]]);
        assert_eq!(target.preimage(&SymbolicMap::Prepend(1), &full).words(), &[vec![2]]);
        assert!(target.preimage(&SymbolicMap::Prepend(0), &full).is_empty());
        let f2 = SymbolicMap::window(vec![0, 0], vec![1, 1]).unwrap();
        let binary = CylinderSet::subshift(3, 4, &[0, 1]).unwrap();
        let pre = binary.preimage(&f2, &binary);
        // f2(x) stays binary iff x has no two consecutive ones; only the first three
        // input symbols are visible through a window of four.
        for w in pre.words() {
            let visible = &w[..w.len().min(3)];
            assert!(!visible.windows(2).any(|p| p == [1, 1]), "{w:?}");
        }
        assert!(pre.covers(&[1, 0, 1, 0]));
        assert!(!pre.meets(&[1, 1]));
    }

    #[test]
    fn subshift_cover_size() {
        let s = CylinderSet::subshift(3, 5, &[0, 1]).unwrap();
        assert_eq!(s.len(), 32);
        assert!(s.contains_point(&[1, 0, 1]));
        assert!(!s.contains_point(&[2]));
    }
}
