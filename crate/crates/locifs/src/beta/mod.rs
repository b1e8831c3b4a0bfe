//! β-transformations, greedy β-expansions and the β-derived local IFS.
//!
//! `T_β(x) = βx − ⌊βx⌋` has greedy digits `d_k(x) = ⌊β T_β^{k−1}(x)⌋`. The local IFS
//! `f_j(x) = (x + j)/β` with `X_j = [0,1]` for `j < m−1` and `X_{m−1} = [0, β−(m−1)]`
//! inverts the branches of `T_β`, and its code space is the β-shift. Orbit arithmetic
//! runs in double-double precision with an error bound carried per digit.

pub mod dd;

use std::cmp::Ordering;

use serde::Serialize;
use thiserror::Error;

use crate::geometry::{AffineContraction, GeometryError, Region};
use crate::ifs::{IfsError, LocalIfs};
use crate::space::GridSpace;
use crate::symbolic::{digits, LanguageSample, Orientation, SymbolicError};
pub use dd::Dd;

/// Default length of the stored expansion of 1.
pub const DEFAULT_DEPTH: usize = 64;
/// Default tolerance for recognizing an exact integer hit or a repeated remainder.
pub const DEFAULT_TOL: f64 = 1e-24;

#[derive(Debug, Error)]
pub enum BetaError {
    #[error("β must exceed 1, got {0}")]
    NotAboveOne(f64),
    #[error("β = {0} is an integer; the last domain degenerates")]
    IntegerBeta(f64),
    #[error("x = {0} is outside [0, 1]")]
    OutOfRange(f64),
    #[error("gap list must be strictly increasing positive integers")]
    BadGapList,
    #[error("requested {requested} terms but only {available} gaps given")]
    TooFewGaps { requested: usize, available: usize },
    #[error("no root of the truncated equation in (4, 5); residual {0:e}")]
    NoRoot(f64),
    #[error("symbol {0} is not a digit of this β")]
    BadDigit(u8),
    #[error(transparent)]
    Symbolic(#[from] SymbolicError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Classification {
    /// `d_β(1)` is finite with this many digits.
    SimpleParry { length: usize },
    /// `d_β(1)` repeats with this preperiod and period.
    ParryPeriodic { preperiod: usize, period: usize },
    UndeterminedToDepth(usize),
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::SimpleParry { length } => write!(f, "SimpleParry({length})"),
            Classification::ParryPeriodic { preperiod, period } => write!(f, "ParryPeriodic({preperiod}, {period})"),
            Classification::UndeterminedToDepth(k) => write!(f, "UndeterminedToDepth({k})"),
        }
    }
}

/// Greedy digits with their reliability horizon.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DigitExpansion {
    pub digits: Vec<u8>,
    /// Number of leading digits certified by the error bound.
    pub reliable: usize,
    /// Index of the digit at which the orbit hit an integer (remainder taken as 0).
    pub exact_hit: Option<usize>,
}

struct Trace {
    expansion: DigitExpansion,
    remainders: Vec<Dd>,
    errors: Vec<f64>,
}

fn trace(beta: Dd, x: Dd, depth: usize, snap: f64) -> Trace {
    let mut t = x;
    let mut err = 0.0f64;
    let mut digits = Vec::with_capacity(depth);
    let mut remainders = vec![t];
    let mut errors = vec![err];
    let mut reliable = None;
    let mut exact_hit = None;
    for k in 0..depth {
        if exact_hit.is_some() {
            digits.push(0);
            remainders.push(Dd::ZERO);
            errors.push(0.0);
            continue;
        }
        let y = beta * t;
        let err_y = beta.to_f64() * err + 2.0 * dd::UNIT * y.to_f64().abs();
        let r = y.round();
        let near = (y - r).abs().to_f64();
        if near <= snap.max(0.0) && k > 0 || near == 0.0 {
            digits.push(r.to_f64() as u8);
            exact_hit = Some(k);
            remainders.push(Dd::ZERO);
            errors.push(0.0);
            continue;
        }
        if reliable.is_none() && near <= err_y {
            reliable = Some(k);
        }
        let d = y.floor();
        digits.push(d.to_f64().max(0.0) as u8);
        t = y - d;
        err = err_y + dd::UNIT;
        remainders.push(t);
        errors.push(err);
    }
    Trace {
        expansion: DigitExpansion { digits, reliable: reliable.unwrap_or(depth), exact_hit },
        remainders,
        errors,
    }
}

/// `T_β(x)` in double precision.
pub fn beta_map(beta: f64, x: f64) -> f64 {
    let y = beta * x;
    y - y.floor()
}

/// The first `depth` greedy digits of `x ∈ [0, 1]`.
pub fn greedy_digits(beta: Dd, x: f64, depth: usize) -> Result<DigitExpansion, BetaError> {
    if !(0.0..=1.0).contains(&x) {
        return Err(BetaError::OutOfRange(x));
    }
    Ok(trace(beta, Dd::from(x), depth, 0.0).expansion)
}

/// Lexicographic admissibility of a finite word.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum LexStatus {
    Admissible,
    Forbidden,
    /// A comparison reached the reliability horizon of `d_β(1)`.
    Undetermined,
}

/// A β with its expansion of 1 and Parry classification.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BetaSystem {
    #[serde(serialize_with = "serialize_dd")]
    beta: Dd,
    m: u8,
    one: DigitExpansion,
    classification: Classification,
    non_parry_by_construction: bool,
    residual: Option<f64>,
}

fn serialize_dd<S: serde::Serializer>(x: &Dd, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&x.to_string())
}

fn is_integer(beta: Dd) -> bool {
    beta.floor() == beta
}

impl BetaSystem {
    pub fn new(beta: Dd) -> Result<Self, BetaError> {
        Self::with_depth(beta, DEFAULT_DEPTH, DEFAULT_TOL)
    }

    pub fn from_f64(beta: f64) -> Result<Self, BetaError> {
        Self::new(Dd::from(beta))
    }

    /// The golden mean `(1 + √5)/2`.
    pub fn golden() -> Self {
        let phi = (Dd::ONE + Dd::from(5.0).sqrt()) / Dd::from(2.0);
        Self::new(phi).expect("golden mean exceeds 1")
    }

    pub fn with_depth(beta: Dd, depth: usize, tol: f64) -> Result<Self, BetaError> {
        if beta.partial_cmp(&Dd::ONE) != Some(Ordering::Greater) {
            return Err(BetaError::NotAboveOne(beta.to_f64()));
        }
        let m = if is_integer(beta) { beta.to_f64() as u8 } else { beta.floor().to_f64() as u8 + 1 };
        let (one, classification) = expand_one(beta, depth, tol);
        Ok(Self { beta, m, one, classification, non_parry_by_construction: false, residual: None })
    }

    pub fn beta(&self) -> Dd {
        self.beta
    }

    pub fn beta_f64(&self) -> f64 {
        self.beta.to_f64()
    }

    /// `m = ⌈β⌉`, the number of digits.
    pub fn m(&self) -> u8 {
        self.m
    }

    /// `d_β(1)` to the stored depth.
    pub fn one_digits(&self) -> &DigitExpansion {
        &self.one
    }

    pub fn classification(&self) -> Classification {
        self.classification
    }

    /// Set for the outputs of [`solve_sparse_beta`].
    pub fn is_non_parry_by_construction(&self) -> bool {
        self.non_parry_by_construction
    }

    pub fn residual(&self) -> Option<f64> {
        self.residual
    }

    /// `σ^k(d_β(1)) ⪯ d_β(1)` over the reliable prefix.
    pub fn is_self_dominating(&self) -> bool {
        let d = &self.one.digits[..self.one.reliable.min(self.one.digits.len())];
        (1..d.len()).all(|k| d[k..] <= d[..d.len() - k])
    }

    /// Banner for systems where the plain `⪯` test is not the usual characterization.
    pub fn warning(&self) -> Option<&'static str> {
        matches!(self.classification, Classification::SimpleParry { .. })
            .then_some("simple Parry β: lexicographic test uses the finite expansion of 1 as stated, without the quasi-greedy adjustment")
    }

    /// `σ^k(c) ⪯ d_β(1)` for every `k`, comparing against the first `depth` digits.
    pub fn lex_admissible(&self, c: &[u8], depth: usize) -> Result<LexStatus, BetaError> {
        if let Some(&s) = c.iter().find(|&&s| s >= self.m) {
            return Err(BetaError::BadDigit(s));
        }
        let one = if depth > self.one.digits.len() {
            expand_one(self.beta, depth, DEFAULT_TOL).0
        } else {
            self.one.clone()
        };
        let horizon = one.reliable.min(depth);
        let mut undetermined = false;
        for k in 0..c.len() {
            let tail = &c[k..];
            match compare_prefix(tail, &one.digits, horizon) {
                Some(std::cmp::Ordering::Greater) => return Ok(LexStatus::Forbidden),
                Some(_) => {}
                None => undetermined = true,
            }
        }
        Ok(if undetermined { LexStatus::Undetermined } else { LexStatus::Admissible })
    }

    /// Admissible words over a sub-alphabet, to length `depth`.
    pub fn restricted_words(&self, alphabet: &[u8], depth: usize) -> Result<LanguageSample, BetaError> {
        if let Some(&s) = alphabet.iter().find(|&&s| s >= self.m) {
            return Err(BetaError::BadDigit(s));
        }
        let one_depth = depth.max(self.one.digits.len());
        let reference = if one_depth > self.one.digits.len() { expand_one(self.beta, one_depth, DEFAULT_TOL).0 } else { self.one.clone() };
        let horizon = reference.reliable;
        let allowed: Vec<bool> = (0..self.m).map(|s| alphabet.contains(&s)).collect();
        Ok(LanguageSample::grow(self.m as usize, Orientation::Future, depth, |w| {
            let last = *w.last().expect("nonempty");
            allowed[last as usize]
                && (0..w.len()).all(|k| compare_prefix(&w[k..], &reference.digits, horizon) != Some(std::cmp::Ordering::Greater))
        })?)
    }

    /// The full β-language to `depth`.
    pub fn words(&self, depth: usize) -> Result<LanguageSample, BetaError> {
        let all: Vec<u8> = (0..self.m).collect();
        self.restricted_words(&all, depth)
    }

    /// The β-derived local IFS on `[0,1]` at the given grid level.
    pub fn local_ifs(&self, level: u8) -> Result<LocalIfs<GridSpace>, BetaError> {
        if is_integer(self.beta) {
            return Err(BetaError::IntegerBeta(self.beta_f64()));
        }
        let b = self.beta_f64();
        let space = GridSpace::new(1, level)?;
        let mut maps = Vec::with_capacity(self.m as usize);
        let mut domains = Vec::with_capacity(self.m as usize);
        for j in 0..self.m {
            maps.push(AffineContraction::line(1.0 / b, j as f64 / b)?);
            let top = if j + 1 == self.m { b - (self.m - 1) as f64 } else { 1.0 };
            domains.push(Region::interval(0.0, top).rasterize(1, level)?);
        }
        Ok(LocalIfs::new(space, maps, domains)?)
    }

    pub fn report(&self) -> String {
        let d = &self.one;
        let mut s = format!(
            "beta = {}\nm = {}\nd_beta(1) = {}\nreliable_digits = {}\nclassification = {}\n",
            self.beta,
            self.m,
            digits(&d.digits),
            d.reliable,
            self.classification
        );
        if let Some(r) = self.residual {
            s += &format!("residual = {r:e}\n");
        }
        if self.non_parry_by_construction {
            s += "non_parry = by construction\n";
        }
        if let Some(w) = self.warning() {
            s += &format!("warning = {w}\n");
        }
        s
    }
}

/// Compares `w` with the prefix of `d` of the same length. `None` when the two agree up
/// to `horizon` and the comparison would need unreliable digits.
fn compare_prefix(w: &[u8], d: &[u8], horizon: usize) -> Option<std::cmp::Ordering> {
    for (i, &s) in w.iter().enumerate() {
        if i >= horizon {
            return None;
        }
        match s.cmp(&d[i]) {
            std::cmp::Ordering::Equal => continue,
            ord => return Some(ord),
        }
    }
    Some(std::cmp::Ordering::Equal)
}

fn expand_one(beta: Dd, depth: usize, tol: f64) -> (DigitExpansion, Classification) {
    if is_integer(beta) {
        let d = beta.to_f64() as u8 - 1;
        let exp = DigitExpansion { digits: vec![d; depth], reliable: depth, exact_hit: None };
        return (exp, Classification::ParryPeriodic { preperiod: 0, period: 1 });
    }
    let tr = trace(beta, Dd::ONE, depth, tol);
    let class = classify(&tr, depth, tol);
    (tr.expansion, class)
}

fn classify(tr: &Trace, depth: usize, tol: f64) -> Classification {
    let e = &tr.expansion;
    if let Some(k) = e.exact_hit {
        if k < e.reliable {
            return Classification::SimpleParry { length: k + 1 };
        }
    }
    let horizon = e.reliable.min(depth);
    for k in 1..=horizon {
        for j in 0..k {
            let slack = tol.max(tr.errors[k] + tr.errors[j]);
            if (tr.remainders[k] - tr.remainders[j]).abs().to_f64() <= slack {
                return Classification::ParryPeriodic { preperiod: j, period: k - j };
            }
        }
    }
    Classification::UndeterminedToDepth(depth)
}

/// Public entry point for reclassifying at another depth or tolerance.
pub fn classify_parry(system: &BetaSystem, depth: usize, tol: f64) -> Classification {
    if system.non_parry_by_construction {
        return Classification::UndeterminedToDepth(depth);
    }
    expand_one(system.beta, depth, tol).1
}

/// Positions of the nonzero digits of `d_β(1)` for the gap list: `1, n_1+2, n_1+n_2+3, …`.
fn sparse_positions(gaps: &[u32]) -> Vec<u32> {
    let mut pos = vec![1];
    for &n in gaps {
        let last = *pos.last().expect("nonempty");
        pos.push(last + n + 1);
    }
    pos
}

fn sparse_residual(beta: Dd, positions: &[u32]) -> Dd {
    let four = Dd::from(4.0);
    let inv = beta.recip();
    let mut rhs = Dd::ZERO;
    for &p in positions {
        rhs = rhs + four * inv.powi(p - 1);
    }
    rhs - beta
}

/// Solves `β = 4 + 4β^{−(n_1+1)} + 4β^{−(n_1+n_2+2)} + …` truncated after `terms`
/// gaps, by bisection on `(4, 5)`.
pub fn solve_sparse_beta(gaps: &[u32], terms: usize, tol: f64) -> Result<BetaSystem, BetaError> {
    if gaps.is_empty() || gaps[0] == 0 || gaps.windows(2).any(|w| w[1] <= w[0]) {
        return Err(BetaError::BadGapList);
    }
    if terms > gaps.len() {
        return Err(BetaError::TooFewGaps { requested: terms, available: gaps.len() });
    }
    let positions = sparse_positions(&gaps[..terms]);
    let (mut lo, mut hi) = (Dd::from(4.0), Dd::from(5.0));
    let (r_lo, r_hi) = (sparse_residual(lo, &positions), sparse_residual(hi, &positions));
    if !(r_lo > Dd::ZERO && r_hi < Dd::ZERO) {
        return Err(BetaError::NoRoot(r_hi.to_f64()));
    }
    for _ in 0..200 {
        let mid = (lo + hi) * Dd::from(0.5);
        if mid == lo || mid == hi {
            break;
        }
        if sparse_residual(mid, &positions) > Dd::ZERO {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let (r_lo, r_hi) = (sparse_residual(lo, &positions).abs(), sparse_residual(hi, &positions).abs());
    let (beta, residual) = if r_lo < r_hi { (lo, r_lo.to_f64()) } else { (hi, r_hi.to_f64()) };
    let inside = beta > Dd::from(4.0) && beta < Dd::from(5.0);
    if residual.is_nan() || residual >= tol || !inside {
        return Err(BetaError::NoRoot(residual));
    }
    let mut system = BetaSystem::new(beta)?;
    system.non_parry_by_construction = true;
    system.classification = Classification::UndeterminedToDepth(system.one.digits.len());
    system.residual = Some(residual);
    Ok(system)
}

/// The digit pattern `4 0^{n_1} 4 0^{n_2} …` over the first `len` positions.
pub fn sparse_pattern(gaps: &[u32], len: usize) -> Vec<u8> {
    let mut out = vec![0; len];
    for p in sparse_positions(gaps) {
        if (p as usize) <= len {
            out[p as usize - 1] = 4;
        }
    }
    out
}
