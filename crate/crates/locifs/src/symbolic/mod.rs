//! Finite words, depth-truncated languages, transition matrices and the
//! subshift-of-finite-type tests.
//!
//! Languages are stored extensionally: level `k` holds every admissible word of
//! length `k`, sorted. Past words are stored oldest symbol first, so the word
//! `(b_{-k}, …, b_{-1})` is the vector `[b_{-k}, …, b_{-1}]`.

pub mod cylinder;

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SymbolicError {
    #[error("symbol {symbol} outside alphabet of size {alphabet}")]
    InvalidSymbol { symbol: u8, alphabet: usize },
    #[error("requested depth {requested} exceeds sample depth {available}")]
    DepthExceeded { requested: usize, available: usize },
    #[error("step {step} must be smaller than verification depth {depth}")]
    InvalidStep { step: usize, depth: usize },
    #[error("alphabet size {0} unsupported (need 1..=10)")]
    InvalidAlphabet(usize),
    #[error("words of length {0} do not fit the sample")]
    BadLevel(usize),
}

/// Reading direction of a word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Orientation {
    /// `(b_{-k}, …, b_{-1})`, oldest symbol first; the last symbol is applied last.
    Past,
    /// `(a_0, …, a_{k-1})`, first symbol first.
    Future,
}

/// A finite word over `{0, …, n-1}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    alphabet: usize,
    symbols: Vec<u8>,
    orientation: Orientation,
}

impl Word {
    pub fn new(alphabet: usize, symbols: Vec<u8>, orientation: Orientation) -> Result<Self, SymbolicError> {
        check_alphabet(alphabet)?;
        if let Some(&symbol) = symbols.iter().find(|&&s| s as usize >= alphabet) {
            return Err(SymbolicError::InvalidSymbol { symbol, alphabet });
        }
        Ok(Self { alphabet, symbols, orientation })
    }

    pub fn past(alphabet: usize, symbols: Vec<u8>) -> Result<Self, SymbolicError> {
        Self::new(alphabet, symbols, Orientation::Past)
    }

    pub fn future(alphabet: usize, symbols: Vec<u8>) -> Result<Self, SymbolicError> {
        Self::new(alphabet, symbols, Orientation::Future)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// The same symbols read in the opposite direction.
    pub fn reversed(&self) -> Self {
        let mut symbols = self.symbols.clone();
        symbols.reverse();
        let orientation = match self.orientation {
            Orientation::Past => Orientation::Future,
            Orientation::Future => Orientation::Past,
        };
        Self { alphabet: self.alphabet, symbols, orientation }
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&digits(&self.symbols))
    }
}

/// Symbols written as decimal digits.
pub fn digits(symbols: &[u8]) -> String {
    symbols.iter().map(|&s| char::from(b'0' + s)).collect()
}

/// Parses a digit string such as `"0102"`.
pub fn parse_digits(text: &str, alphabet: usize) -> Result<Vec<u8>, SymbolicError> {
    text.bytes()
        .map(|b| {
            let s = b.wrapping_sub(b'0');
            if (s as usize) < alphabet && b.is_ascii_digit() {
                Ok(s)
            } else {
                Err(SymbolicError::InvalidSymbol { symbol: s, alphabet })
            }
        })
        .collect()
}

fn check_alphabet(n: usize) -> Result<(), SymbolicError> {
    if (1..=10).contains(&n) {
        Ok(())
    } else {
        Err(SymbolicError::InvalidAlphabet(n))
    }
}

/// All admissible words of each length `0..=depth`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LanguageSample {
    alphabet: usize,
    orientation: Orientation,
    levels: Vec<Vec<Vec<u8>>>,
}

impl LanguageSample {
    /// Builds a sample from per-length word lists (`levels[k]` holds words of length `k`;
    /// level 0 is filled in with the empty word when missing).
    pub fn from_levels(alphabet: usize, orientation: Orientation, mut levels: Vec<Vec<Vec<u8>>>) -> Result<Self, SymbolicError> {
        check_alphabet(alphabet)?;
        if levels.is_empty() || levels[0].is_empty() {
            if levels.is_empty() {
                levels.push(Vec::new());
            }
            levels[0] = vec![Vec::new()];
        }
        for (k, level) in levels.iter_mut().enumerate() {
            for w in level.iter() {
                if w.len() != k {
                    return Err(SymbolicError::BadLevel(w.len()));
                }
                if let Some(&symbol) = w.iter().find(|&&s| s as usize >= alphabet) {
                    return Err(SymbolicError::InvalidSymbol { symbol, alphabet });
                }
            }
            level.sort_unstable();
            level.dedup();
        }
        Ok(Self { alphabet, orientation, levels })
    }

    /// Grows a sample by appending symbols to admissible words and keeping the children
    /// accepted by `admissible` (children of rejected words are never tested).
    pub fn grow(alphabet: usize, orientation: Orientation, depth: usize, admissible: impl Fn(&[u8]) -> bool) -> Result<Self, SymbolicError> {
        check_alphabet(alphabet)?;
        let mut levels = vec![vec![Vec::new()]];
        for k in 1..=depth {
            let next: Vec<Vec<u8>> = levels[k - 1]
                .iter()
                .flat_map(|w| {
                    (0..alphabet as u8).map(move |s| {
                        let mut c = w.clone();
                        c.push(s);
                        c
                    })
                })
                .filter(|c| admissible(c))
                .collect();
            levels.push(next);
        }
        Self::from_levels(alphabet, orientation, levels)
    }

    /// The full shift on `n` symbols to `depth`.
    pub fn full_shift(alphabet: usize, depth: usize) -> Result<Self, SymbolicError> {
        Self::grow(alphabet, Orientation::Future, depth, |_| true)
    }

    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    pub fn orientation(&self) -> Orientation {
        self.orientation
    }

    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    pub fn words(&self, k: usize) -> &[Vec<u8>] {
        self.levels.get(k).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn count(&self, k: usize) -> usize {
        self.words(k).len()
    }

    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }

    pub fn contains(&self, w: &[u8]) -> bool {
        self.words(w.len()).binary_search_by(|x| x.as_slice().cmp(w)).is_ok()
    }

    /// The sample cut to a smaller depth.
    pub fn truncated(&self, depth: usize) -> Self {
        let mut out = self.clone();
        out.levels.truncate(depth + 1);
        out
    }

    /// Words of length `k < depth` that are not the suffix of any word of length `k + 1`.
    pub fn non_extendable(&self, k: usize) -> Vec<Vec<u8>> {
        if k >= self.depth() {
            return Vec::new();
        }
        let suffixes: BTreeSet<&[u8]> = self.words(k + 1).iter().map(|w| &w[1..]).collect();
        self.words(k).iter().filter(|w| !suffixes.contains(w.as_slice())).cloned().collect()
    }

    /// One word per line as digits, grouped by increasing length.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for level in self.levels.iter().skip(1) {
            for w in level {
                out.push_str(&digits(w));
                out.push('\n');
            }
        }
        out
    }
}

/// Boolean `n x n` matrix; `get(i, j)` is `m_ij`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
pub struct TransitionMatrix {
    rows: Vec<Vec<bool>>,
}

impl TransitionMatrix {
    pub fn from_rows(rows: Vec<Vec<bool>>) -> Result<Self, SymbolicError> {
        let n = rows.len();
        check_alphabet(n)?;
        if rows.iter().any(|r| r.len() != n) {
            return Err(SymbolicError::InvalidAlphabet(n));
        }
        Ok(Self { rows })
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> bool) -> Result<Self, SymbolicError> {
        Self::from_rows((0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect())
    }

    pub fn all_ones(n: usize) -> Result<Self, SymbolicError> {
        Self::from_fn(n, |_, _| true)
    }

    pub fn size(&self) -> usize {
        self.rows.len()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.rows[i][j]
    }

    pub fn rows(&self) -> &[Vec<bool>] {
        &self.rows
    }

    /// Rows as `0`/`1` strings.
    pub fn to_strings(&self) -> Vec<String> {
        self.rows.iter().map(|r| r.iter().map(|&b| if b { '1' } else { '0' }).collect()).collect()
    }
}

impl fmt::Display for TransitionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}]", self.to_strings().join(","))
    }
}

/// Past words `(b_{-k}, …, b_{-1})` with `m[b_{-(j-1)}][b_{-j}] = 1` for every consecutive pair.
pub fn walk_words(m: &TransitionMatrix, k: usize) -> Result<LanguageSample, SymbolicError> {
    LanguageSample::grow(m.size(), Orientation::Past, k, |w| {
        let n = w.len();
        n < 2 || m.get(w[n - 1] as usize, w[n - 2] as usize)
    })
}

/// Outcome of the finite-depth subshift-of-finite-type test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SftReport {
    pub holds: bool,
    pub step: usize,
    pub depth: usize,
    /// First length at which the language differs from its `(step+1)`-block closure.
    pub failing_depth: Option<usize>,
    /// Lexicographically largest word in the symmetric difference at `failing_depth`.
    pub witness: Option<Vec<u8>>,
    /// True when the witness is in the block closure but not in the language.
    pub witness_forbidden: bool,
}

impl SftReport {
    pub fn summary(&self) -> String {
        match (&self.witness, self.holds) {
            (_, true) => format!("{}-step SFT certificate to depth {}", self.step, self.depth),
            (Some(w), false) => format!(
                "not {}-step at depth {}: witness {} ({})",
                self.step,
                self.failing_depth.unwrap_or(0),
                digits(w),
                if self.witness_forbidden { "all blocks allowed, word excluded" } else { "word present, blocks missing" }
            ),
            (None, false) => format!("not {}-step", self.step),
        }
    }
}

/// Checks that every length `m` in `(k, depth]` of the sample equals the set of words
/// all of whose `(k+1)`-subwords are admissible.
pub fn is_k_step_sft(lang: &LanguageSample, k: usize, depth: usize) -> Result<SftReport, SymbolicError> {
    if depth > lang.depth() {
        return Err(SymbolicError::DepthExceeded { requested: depth, available: lang.depth() });
    }
    if k >= depth {
        return Err(SymbolicError::InvalidStep { step: k, depth });
    }
    let blocks: BTreeSet<&[u8]> = lang.words(k + 1).iter().map(Vec::as_slice).collect();
    let mut closure: Vec<Vec<u8>> = lang.words(k + 1).to_vec();
    for m in (k + 2)..=depth {
        let mut next = Vec::new();
        for w in &closure {
            for s in 0..lang.alphabet() as u8 {
                let mut c = w.clone();
                c.push(s);
                if blocks.contains(&c[m - k - 1..]) {
                    next.push(c);
                }
            }
        }
        next.sort_unstable();
        closure = next;
        let actual = lang.words(m);
        if closure.as_slice() != actual {
            let in_closure: BTreeSet<&Vec<u8>> = closure.iter().collect();
            let in_lang: BTreeSet<&Vec<u8>> = actual.iter().collect();
            let forbidden = in_closure.difference(&in_lang).last().map(|w| (*w).clone());
            let (witness, witness_forbidden) = match forbidden {
                Some(w) => (w, true),
                None => ((*in_lang.difference(&in_closure).last().expect("sets differ")).clone(), false),
            };
            return Ok(SftReport {
                holds: false,
                step: k,
                depth,
                failing_depth: Some(m),
                witness: Some(witness),
                witness_forbidden,
            });
        }
    }
    Ok(SftReport { holds: true, step: k, depth, failing_depth: None, witness: None, witness_forbidden: false })
}

/// Number of distinct follower sets `{w : uw admissible, |w| <= depth - m}` over the
/// admissible words `u` of length `m`.
pub fn follower_count(lang: &LanguageSample, m: usize) -> Result<usize, SymbolicError> {
    if m >= lang.depth() {
        return Err(SymbolicError::DepthExceeded { requested: m + 1, available: lang.depth() });
    }
    let mut followers: HashMap<&[u8], Vec<&[u8]>> = lang.words(m).iter().map(|u| (u.as_slice(), Vec::new())).collect();
    for len in (m + 1)..=lang.depth() {
        for w in lang.words(len) {
            if let Some(list) = followers.get_mut(&w[..m]) {
                list.push(&w[m..]);
            }
        }
    }
    let classes: BTreeSet<Vec<&[u8]>> = followers.into_values().collect();
    Ok(classes.len())
}

/// Result of the factorial check.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct FactorialReport {
    pub passes: bool,
    /// `(word, missing subword)` pairs.
    pub violations: Vec<(Vec<u8>, Vec<u8>)>,
}

/// Verifies that the prefix and suffix of length `k-1` of every `k`-word are admissible.
pub fn check_factorial(lang: &LanguageSample) -> FactorialReport {
    let mut violations = Vec::new();
    for k in 1..=lang.depth() {
        for w in lang.words(k) {
            for sub in [&w[..k - 1], &w[1..]] {
                if !lang.contains(sub) {
                    violations.push((w.clone(), sub.to_vec()));
                }
            }
        }
    }
    FactorialReport { passes: violations.is_empty(), violations }
}

/// Per-length word counts, e.g. for CSV export.
pub fn count_table(lang: &LanguageSample) -> BTreeMap<usize, usize> {
    (1..=lang.depth()).map(|k| (k, lang.count(k))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn golden() -> TransitionMatrix {
        TransitionMatrix::from_rows(vec![vec![true, true], vec![true, false]]).unwrap()
    }

    #[test]
    fn walk_word_examples() {
        assert_eq!(walk_words(&TransitionMatrix::all_ones(3).unwrap(), 4).unwrap().count(4), 81);
        let id = TransitionMatrix::from_fn(2, |i, j| i == j).unwrap();
        assert_eq!(walk_words(&id, 3).unwrap().words(3), &[vec![0, 0, 0], vec![1, 1, 1]]);
        let g = walk_words(&golden(), 3).unwrap();
        let texts: Vec<String> = g.words(3).iter().map(|w| digits(w)).collect();
        assert_eq!(texts, ["000", "001", "010", "100", "101"]);
        assert_eq!(walk_words(&golden(), 1).unwrap().count(1), 2);
    }

    #[test]
    fn sft_examples() {
        let full = LanguageSample::full_shift(2, 6).unwrap();
        for k in 0..5 {
            assert!(is_k_step_sft(&full, k, 6).unwrap().holds);
        }
        let g = walk_words(&golden(), 8).unwrap();
        assert!(is_k_step_sft(&g, 1, 8).unwrap().holds);
        assert!(matches!(is_k_step_sft(&g, 1, 9), Err(SymbolicError::DepthExceeded { .. })));
        assert!(matches!(is_k_step_sft(&g, 8, 8), Err(SymbolicError::InvalidStep { .. })));
    }

    #[test]
    fn sft_detects_long_forbidden_word() {
        // Binary words avoiding 0110: a 3-step but not 2-step shift.
        let lang = LanguageSample::grow(2, Orientation::Future, 8, |w| !w.windows(4).any(|b| b == [0, 1, 1, 0])).unwrap();
        let r = is_k_step_sft(&lang, 2, 8).unwrap();
        assert!(!r.holds);
        assert_eq!(r.failing_depth, Some(4));
        assert_eq!(r.witness.as_deref(), Some(&[0, 1, 1, 0][..]));
        assert!(r.witness_forbidden);
        assert!(is_k_step_sft(&lang, 3, 8).unwrap().holds);
    }

    #[test]
    fn follower_examples() {
        let full = LanguageSample::full_shift(3, 5).unwrap();
        assert_eq!(follower_count(&full, 2).unwrap(), 1);
        let g = walk_words(&golden(), 8).unwrap();
        assert_eq!(follower_count(&g, 3).unwrap(), 2);
    }

    #[test]
    fn factorial_examples() {
        let full = LanguageSample::full_shift(2, 4).unwrap();
        assert!(check_factorial(&full).passes);
        let mut levels = vec![vec![vec![]], vec![vec![0]], vec![vec![0, 0], vec![0, 1]]];
        levels[1].push(vec![1]);
        levels[2].push(vec![1, 1]);
        let mut broken = LanguageSample::from_levels(2, Orientation::Future, levels).unwrap();
        assert!(check_factorial(&broken).passes);
        broken.levels[1].retain(|w| w != &[1]);
        let r = check_factorial(&broken);
        assert!(!r.passes);
        assert!(r.violations.contains(&(vec![0, 1], vec![1])));
    }

    #[test]
    fn word_validation_and_reversal() {
        assert!(Word::past(2, vec![0, 2]).is_err());
        let w = Word::past(3, vec![0, 1, 2]).unwrap();
        let r = w.reversed();
        assert_eq!(r.symbols(), &[2, 1, 0]);
        assert_eq!(r.orientation(), Orientation::Future);
        assert_eq!(w.to_string(), "012");
        assert_eq!(parse_digits("0120", 3).unwrap(), vec![0, 1, 2, 0]);
        assert!(parse_digits("03", 3).is_err());
    }

    #[test]
    fn non_extendable_words_are_flagged() {
        let lang = LanguageSample::from_levels(
            2,
            Orientation::Past,
            vec![vec![vec![]], vec![vec![0], vec![1]], vec![vec![0, 0]]],
        )
        .unwrap();
        assert_eq!(lang.non_extendable(1), vec![vec![1]]);
    }
}
