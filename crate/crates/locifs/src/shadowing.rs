//! Pseudo-orbits, shadow search and the finite-horizon shadowing diagnostics.
//!
//! An `(a, δ)`-pseudo-orbit is a point sequence with `x_k ∈ X_{a_k}` and
//! `d(f_{a_k}(x_k), x_{k+1}) < δ`. It is `(a, ε)`-shadowed by `x` when the true orbit
//! `f_a^k(x)` stays within `ε` of `x_k`. Everything here works at a finite horizon `N`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::ifs::{IfsError, LocalIfs, OscReport, OscVerdict};
use crate::space::Space;
use crate::symbolic::{digits, is_k_step_sft, SftReport};

/// Default horizon for shadowing reports.
pub const DEFAULT_HORIZON: usize = 64;
/// Maximum number of candidate starts tried by [`shadow_search`].
pub const MAX_CANDIDATES: usize = 4096;

#[derive(Debug, Error)]
pub enum ShadowError {
    #[error("contraction rate {0} is not below 1")]
    BadRate(f64),
    #[error("no δ-perturbed continuation inside the next domain at step {0}")]
    DeadEnd(usize),
    #[error("point leaves domain X_{symbol} at step {step}")]
    DomainViolation { step: usize, symbol: u8 },
    #[error("orbit domain of the word is empty at depth {0}")]
    EmptyIa(usize),
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
    #[error("symbol and point sequences differ in length ({symbols} vs {points})")]
    Shape { symbols: usize, points: usize },
    #[error(transparent)]
    Ifs(#[from] IfsError),
}

/// Points `x_0..x_N` along the symbols `a_0..a_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct PseudoOrbit<P> {
    pub symbols: Vec<u8>,
    pub points: Vec<P>,
    pub delta: f64,
    /// `d(f_{a_k}(x_k), x_{k+1})` for `k < N`; filled by verification.
    pub step_errors: Vec<f64>,
    pub verified: bool,
}

impl<P: Clone> PseudoOrbit<P> {
    pub fn from_parts(symbols: Vec<u8>, points: Vec<P>, delta: f64) -> Result<Self, ShadowError> {
        if symbols.len() != points.len() || symbols.is_empty() {
            return Err(ShadowError::Shape { symbols: symbols.len(), points: points.len() });
        }
        Ok(Self { symbols, points, delta, step_errors: Vec::new(), verified: false })
    }

    /// The horizon `N`.
    pub fn horizon(&self) -> usize {
        self.points.len() - 1
    }

    /// The first `n + 1` points.
    pub fn prefix(&self, n: usize) -> Self {
        let m = (n + 1).min(self.points.len());
        Self {
            symbols: self.symbols[..m].to_vec(),
            points: self.points[..m].to_vec(),
            delta: self.delta,
            step_errors: self.step_errors.iter().take(m.saturating_sub(1)).copied().collect(),
            verified: self.verified,
        }
    }

    pub fn max_step_error(&self) -> f64 {
        self.step_errors.iter().copied().fold(0.0, f64::max)
    }
}

/// Checks domain membership and the step errors; sets `verified` and `step_errors`.
pub fn verify_pseudo_orbit<S: Space>(ifs: &LocalIfs<S>, po: &mut PseudoOrbit<S::Point>) -> Result<bool, ShadowError> {
    let sp = ifs.space();
    let n = po.points.len();
    let mut errors = Vec::with_capacity(n.saturating_sub(1));
    let mut ok = true;
    for k in 0..n {
        let s = po.symbols[k];
        if s as usize >= ifs.len() {
            return Err(IfsError::BadSymbol { symbol: s, maps: ifs.len() }.into());
        }
        ok &= sp.contains_point(ifs.domain(s as usize), &po.points[k]);
        if k + 1 < n {
            let e = match sp.apply(ifs.map(s as usize), &po.points[k]) {
                Some(y) => sp.distance(&y, &po.points[k + 1]),
                None => f64::INFINITY,
            };
            ok &= e < po.delta;
            errors.push(e);
        }
    }
    po.step_errors = errors;
    po.verified = ok;
    Ok(ok)
}

/// A seeded `(a, δ)`-pseudo-orbit inside the attractor cover: each point is a random
/// point of `X_{a_{k+1}} ∩ A` within `δ` of `f_{a_k}(x_k)`.
pub fn make_pseudo_orbit<S: Space>(
    ifs: &LocalIfs<S>,
    attractor: &S::Set,
    a: &[u8],
    delta: f64,
    seed: u64,
) -> Result<PseudoOrbit<S::Point>, ShadowError> {
    if delta.is_nan() || delta <= 0.0 {
        return Err(ShadowError::BadTolerance(delta));
    }
    if a.is_empty() {
        return Err(IfsError::EmptyWord.into());
    }
    if let Some(&symbol) = a.iter().find(|&&s| s as usize >= ifs.len()) {
        return Err(IfsError::BadSymbol { symbol, maps: ifs.len() }.into());
    }
    let sp = ifs.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let allowed: Vec<S::Set> = ifs.domains().iter().map(|x| sp.intersect(x, attractor)).collect();
    let mut x = sp.sample(&allowed[a[0] as usize], &mut rng).ok_or(ShadowError::DeadEnd(0))?;
    let mut points = vec![x.clone()];
    for k in 0..a.len() - 1 {
        let y = sp.apply(ifs.map(a[k] as usize), &x).ok_or(ShadowError::DeadEnd(k))?;
        x = sp.sample_near(&allowed[a[k + 1] as usize], &y, delta, &mut rng).ok_or(ShadowError::DeadEnd(k))?;
        points.push(x.clone());
    }
    let mut po = PseudoOrbit::from_parts(a.to_vec(), points, delta)?;
    verify_pseudo_orbit(ifs, &mut po)?;
    Ok(po)
}

/// A random start in the attractor cover and the symbols `a_0..a_{len-1}` of a true
/// orbit from it, each next symbol drawn uniformly among the domains containing the
/// current point. `None` when the orbit reaches a point outside every domain.
pub fn random_orbit_word<S: Space>(ifs: &LocalIfs<S>, attractor: &S::Set, len: usize, seed: u64) -> Option<(S::Point, Vec<u8>)> {
    let sp = ifs.space();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let start = sp.sample(attractor, &mut rng)?;
    let mut x = start.clone();
    let mut word = Vec::with_capacity(len);
    for _ in 0..len {
        let options: Vec<usize> = (0..ifs.len()).filter(|&j| sp.contains_point(ifs.domain(j), &x)).collect();
        if options.is_empty() {
            return None;
        }
        let j = options[rng.random_range(0..options.len())];
        word.push(j as u8);
        x = sp.apply(ifs.map(j), &x)?;
    }
    Some((start, word))
}

/// Iterates the skew product `(a, x) -> (σ(a), f_{a_0}(x))`.
pub fn skew_step<S: Space>(ifs: &LocalIfs<S>, a: &[u8], x: &S::Point) -> Result<(Vec<u8>, S::Point), ShadowError> {
    let (&s, rest) = a.split_first().ok_or(IfsError::EmptyWord)?;
    if s as usize >= ifs.len() {
        return Err(IfsError::BadSymbol { symbol: s, maps: ifs.len() }.into());
    }
    let sp = ifs.space();
    if !sp.contains_point(ifs.domain(s as usize), x) {
        return Err(ShadowError::DomainViolation { step: 0, symbol: s });
    }
    let y = sp.apply(ifs.map(s as usize), x).ok_or(ShadowError::DomainViolation { step: 0, symbol: s })?;
    Ok((rest.to_vec(), y))
}

/// `x, f_{a_0}(x), …`: one point per symbol plus the final image.
pub fn orbit<S: Space>(ifs: &LocalIfs<S>, a: &[u8], x: &S::Point) -> Result<Vec<S::Point>, ShadowError> {
    let mut word = a.to_vec();
    let mut points = vec![x.clone()];
    let mut step = 0;
    while !word.is_empty() {
        let (rest, y) = skew_step(ifs, &word, points.last().expect("nonempty")).map_err(|e| match e {
            ShadowError::DomainViolation { symbol, .. } => ShadowError::DomainViolation { step, symbol },
            other => other,
        })?;
        word = rest;
        points.push(y);
        step += 1;
    }
    Ok(points)
}

/// The true orbit of `x` along `a` (length `a.len()`), as a pseudo-orbit for `delta`.
pub fn true_orbit<S: Space>(ifs: &LocalIfs<S>, a: &[u8], x: &S::Point, delta: f64) -> Result<PseudoOrbit<S::Point>, ShadowError> {
    let mut points = orbit(ifs, &a[..a.len().saturating_sub(1)], x)?;
    if let Some(&last) = a.last() {
        if !ifs.space().contains_point(ifs.domain(last as usize), points.last().expect("nonempty")) {
            return Err(ShadowError::DomainViolation { step: a.len() - 1, symbol: last });
        }
    } else {
        return Err(IfsError::EmptyWord.into());
    }
    points.truncate(a.len());
    let mut po = PseudoOrbit::from_parts(a.to_vec(), points, delta)?;
    verify_pseudo_orbit(ifs, &mut po)?;
    Ok(po)
}

/// `δ/(1−λ) + λ^m·d0`.
pub fn l1_bound(delta: f64, lambda: f64, m: usize, d0: f64) -> Result<f64, ShadowError> {
    if !(0.0..1.0).contains(&lambda) {
        return Err(ShadowError::BadRate(lambda));
    }
    Ok(delta / (1.0 - lambda) + lambda.powi(m as i32) * d0)
}

/// `d(f_a^k(x), x_k)` for `k = 0..=N`, or `None` when the orbit leaves a domain.
pub fn tracking_distances<S: Space>(ifs: &LocalIfs<S>, po: &PseudoOrbit<S::Point>, x: &S::Point) -> Option<Vec<f64>> {
    let sp = ifs.space();
    let mut y = x.clone();
    let mut out = Vec::with_capacity(po.points.len());
    for (k, (&s, target)) in po.symbols.iter().zip(&po.points).enumerate() {
        if !sp.contains_point(ifs.domain(s as usize), &y) {
            return None;
        }
        out.push(sp.distance(&y, target));
        if k + 1 < po.points.len() {
            y = sp.apply(ifs.map(s as usize), &y)?;
        }
    }
    Some(out)
}

#[derive(Debug, Clone, PartialEq)]
pub enum ShadowStatus<P> {
    ShadowFound { witness: P, achieved: f64, distances: Vec<f64> },
    /// No start in the orbit domain lies within `ε` of `x_0`; `bound` is a lower bound
    /// on the distance.
    CertifiedNone { bound: f64 },
    Inconclusive { best: Option<f64>, note: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShadowResult<P> {
    pub status: ShadowStatus<P>,
    pub epsilon: f64,
    pub horizon: usize,
    pub candidates: usize,
}

impl<P> ShadowResult<P> {
    pub fn is_found(&self) -> bool {
        matches!(self.status, ShadowStatus::ShadowFound { .. })
    }

    pub fn is_certified_none(&self) -> bool {
        matches!(self.status, ShadowStatus::CertifiedNone { .. })
    }

    /// Cesàro mean of the tracking distances of the witness.
    pub fn cesaro_mean(&self) -> Option<f64> {
        match &self.status {
            ShadowStatus::ShadowFound { distances, .. } if !distances.is_empty() => {
                Some(distances.iter().sum::<f64>() / distances.len() as f64)
            }
            _ => None,
        }
    }

    pub fn status_name(&self) -> &'static str {
        match self.status {
            ShadowStatus::ShadowFound { .. } => "ShadowFound",
            ShadowStatus::CertifiedNone { .. } => "CertifiedNone",
            ShadowStatus::Inconclusive { .. } => "Inconclusive",
        }
    }

    pub fn to_text(&self, format_point: impl Fn(&P) -> String) -> String {
        let mut s = format!(
            "status = {}\nepsilon = {}\nhorizon = {}\ncandidates = {}\n",
            self.status_name(),
            self.epsilon,
            self.horizon,
            self.candidates
        );
        match &self.status {
            ShadowStatus::ShadowFound { witness, achieved, .. } => {
                s += &format!("witness = {}\nachieved = {achieved}\n", format_point(witness));
                if let Some(c) = self.cesaro_mean() {
                    s += &format!("cesaro_mean = {c}\n");
                }
            }
            ShadowStatus::CertifiedNone { bound } => s += &format!("lower_bound = {bound}\n"),
            ShadowStatus::Inconclusive { best, note } => {
                match best {
                    Some(b) => s += &format!("best = {b}\n"),
                    None => s += "best = none\n",
                }
                s += &format!("note = {note}\n");
            }
        }
        s
    }
}

/// Searches for a true orbit `ε`-shadowing `po` along the same symbols.
///
/// Returns `CertifiedNone` only when a rigorous lower bound on the distance from `x_0`
/// to the orbit domain `I_N(a)` reaches `ε`. Otherwise `x_0` itself and then the
/// representatives of `I_N(a)` nearest to `x_0` are tried in order.
pub fn shadow_search<S: Space>(ifs: &LocalIfs<S>, po: &PseudoOrbit<S::Point>, epsilon: f64) -> Result<ShadowResult<S::Point>, ShadowError> {
    let sp = ifs.space();
    let horizon = po.horizon();
    let domain = ifs.orbit_domain(&po.symbols)?;
    let x0 = &po.points[0];
    let result = |status, candidates| ShadowResult { status, epsilon, horizon, candidates };
    let bound = match sp.distance_to_set(x0, &domain) {
        None => return Ok(result(ShadowStatus::CertifiedNone { bound: f64::INFINITY }, 0)),
        Some(b) => b,
    };
    if bound >= epsilon {
        return Ok(result(ShadowStatus::CertifiedNone { bound }, 0));
    }
    let mut candidates = Vec::with_capacity(MAX_CANDIDATES + 1);
    if sp.contains_point(&domain, x0) {
        candidates.push(x0.clone());
    }
    candidates.extend(sp.representatives(&domain, x0, MAX_CANDIDATES));
    let tracked: Vec<Option<Vec<f64>>> = candidates.par_iter().map(|c| tracking_distances(ifs, po, c)).collect();
    let sup = |d: &Vec<f64>| d.iter().copied().fold(0.0, f64::max);
    for (c, t) in candidates.iter().zip(&tracked) {
        if let Some(d) = t {
            let s = sup(d);
            if s < epsilon {
                let status = ShadowStatus::ShadowFound { witness: c.clone(), achieved: s, distances: d.clone() };
                return Ok(result(status, candidates.len()));
            }
        }
    }
    let best = tracked.iter().flatten().map(sup).fold(None, |acc: Option<f64>, s| Some(acc.map_or(s, |a| a.min(s))));
    let note = format!(
        "no candidate within {epsilon}; lower bound {bound} below epsilon at resolution slack {}",
        sp.slack()
    );
    Ok(result(ShadowStatus::Inconclusive { best, note }, candidates.len()))
}

/// Independent check of a witness: domain membership and `sup_k d(f_a^k(x), x_k) < ε`.
pub fn verify_witness<S: Space>(ifs: &LocalIfs<S>, po: &PseudoOrbit<S::Point>, x: &S::Point, epsilon: f64) -> bool {
    let sp = ifs.space();
    let mut y = x.clone();
    for k in 0..po.points.len() {
        let s = po.symbols[k] as usize;
        if !sp.contains_point(ifs.domain(s), &y) || sp.distance(&y, &po.points[k]) >= epsilon {
            return false;
        }
        if k + 1 < po.points.len() {
            match sp.apply(ifs.map(s), &y) {
                Some(z) => y = z,
                None => return false,
            }
        }
    }
    true
}

/// The sets `E_n = {x ∈ I_n(a) : d(f_a^k(x), x_k) < ε, k ≤ n}` for `n = 0..=N`.
pub fn witness_sets<S: Space>(ifs: &LocalIfs<S>, po: &PseudoOrbit<S::Point>, epsilon: f64) -> Vec<S::Set> {
    let sp = ifs.space();
    let local: Vec<S::Set> = po
        .symbols
        .iter()
        .zip(&po.points)
        .map(|(&s, p)| sp.intersect(ifs.domain(s as usize), &sp.ball(p, epsilon)))
        .collect();
    (0..po.points.len())
        .into_par_iter()
        .map(|n| {
            let mut e = local[n].clone();
            for k in (0..n).rev() {
                let s = po.symbols[k] as usize;
                e = sp.intersect(&local[k], &sp.preimage(&e, ifs.map(s), ifs.domain(s)));
            }
            e
        })
        .collect()
}

/// Outer cover of the starts of `(a, δ)`-pseudo-orbits of length `a.len()`.
pub fn gamma_zero_set<S: Space>(ifs: &LocalIfs<S>, a: &[u8], delta: f64) -> Result<S::Set, ShadowError> {
    if delta.is_nan() || delta < 0.0 {
        return Err(ShadowError::BadTolerance(delta));
    }
    if delta == 0.0 {
        return Ok(ifs.orbit_domain(a)?);
    }
    let sp = ifs.space();
    let (&last, rest) = a.split_last().ok_or(IfsError::EmptyWord)?;
    if let Some(&symbol) = a.iter().find(|&&s| s as usize >= ifs.len()) {
        return Err(IfsError::BadSymbol { symbol, maps: ifs.len() }.into());
    }
    let mut s = ifs.domain(last as usize).clone();
    for &t in rest.iter().rev() {
        let t = t as usize;
        s = sp.preimage(&sp.dilate(&s, delta), ifs.map(t), ifs.domain(t));
    }
    Ok(s)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapPoint {
    pub delta: f64,
    pub gap: f64,
    /// Element of the pseudo-orbit start set realizing the gap.
    pub witness: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GapCurve {
    pub horizon: usize,
    pub points: Vec<GapPoint>,
}

impl GapCurve {
    /// The gaps do not increase as `δ` decreases along the list, up to `slack`.
    pub fn is_non_increasing(&self, slack: f64) -> bool {
        self.points.windows(2).all(|w| w[1].gap <= w[0].gap + slack)
    }

    pub fn min_gap(&self) -> f64 {
        self.points.iter().map(|p| p.gap).fold(f64::INFINITY, f64::min)
    }

    pub fn last_gap(&self) -> Option<f64> {
        self.points.last().map(|p| p.gap)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("delta,gap,witness\n");
        for p in &self.points {
            s += &format!("{},{},{}\n", p.delta, p.gap, p.witness);
        }
        s
    }
}

/// Hausdorff distance (with slack) between the pseudo-orbit start set and `I_N(a)`.
pub fn gap_at<S: Space>(ifs: &LocalIfs<S>, a: &[u8], delta: f64) -> Result<GapPoint, ShadowError> {
    let sp = ifs.space();
    let domain = ifs.orbit_domain(a)?;
    if sp.is_empty(&domain) {
        return Err(ShadowError::EmptyIa(a.len()));
    }
    let gamma = gamma_zero_set(ifs, a, delta)?;
    let (raw, witness) = sp.directed(&gamma, &domain).ok_or(ShadowError::EmptyIa(a.len()))?;
    let back = sp.directed(&domain, &gamma).map_or(0.0, |t| t.0);
    let gap = if gamma == domain { 0.0 } else { raw.max(back) + sp.slack() };
    Ok(GapPoint { delta, gap, witness })
}

/// The gap curve over `deltas` for a fixed word.
pub fn shadowing_gap<S: Space>(ifs: &LocalIfs<S>, a: &[u8], deltas: &[f64]) -> Result<GapCurve, ShadowError> {
    let points = deltas.iter().map(|&d| gap_at(ifs, a, d)).collect::<Result<Vec<_>, _>>()?;
    Ok(GapCurve { horizon: a.len().saturating_sub(1), points })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeShadowingReport {
    pub sft: SftReport,
    pub osc: Option<OscVerdict>,
    pub warning: Option<String>,
}

impl NegativeShadowingReport {
    pub fn holds(&self) -> bool {
        self.sft.holds
    }

    pub fn summary(&self) -> String {
        let mut s = if self.sft.holds {
            format!(
                "negative shadowing: finite-depth YES ({}-step SFT certificate at depth {})",
                self.sft.step, self.sft.depth
            )
        } else {
            let w = self.sft.witness.as_deref().map(digits).unwrap_or_default();
            format!("negative shadowing: finite-depth NO with witness word {w}")
        };
        if let Some(w) = &self.warning {
            s += &format!("\nwarning: {w}");
        }
        s
    }
}

/// Runs the `k`-step SFT test on the code words to depth `depth`.
pub fn negative_shadowing_certificate<S: Space>(
    ifs: &LocalIfs<S>,
    osc: Option<&OscReport>,
    k: usize,
    depth: usize,
) -> Result<NegativeShadowingReport, ShadowError> {
    let lang = ifs.code_words(depth)?;
    let sft = is_k_step_sft(&lang, k, depth).map_err(IfsError::from)?;
    let verdict = osc.map(|r| r.verdict);
    let warning = match verdict {
        Some(OscVerdict::FailsAtResolution) => Some("open set condition fails at resolution; the coding may not be a conjugacy".into()),
        None => Some("open set condition not probed".into()),
        _ => None,
    };
    Ok(NegativeShadowingReport { sft, osc: verdict, warning })
}

/// Moves every point of `po` to a nearest point of the matching domain of `target`.
/// The result is re-verified as a pseudo-orbit of `target` for tolerance `delta_out`.
pub fn snap_pseudo_orbit<S: Space>(
    target: &LocalIfs<S>,
    po: &PseudoOrbit<S::Point>,
    delta_out: f64,
) -> Result<PseudoOrbit<S::Point>, ShadowError> {
    let sp = target.space();
    let points = po
        .symbols
        .iter()
        .zip(&po.points)
        .enumerate()
        .map(|(k, (&s, p))| {
            let x = target.domain(s as usize);
            if sp.contains_point(x, p) {
                Ok(p.clone())
            } else {
                sp.nearest_point(x, p).ok_or(ShadowError::DeadEnd(k))
            }
        })
        .collect::<Result<Vec<_>, _>>()?;
    let mut out = PseudoOrbit::from_parts(po.symbols.clone(), points, delta_out)?;
    verify_pseudo_orbit(target, &mut out)?;
    Ok(out)
}

/// CSV with columns `k, symbol, coordinates…, step_error`.
pub fn pseudo_orbit_csv<S: Space>(space: &S, po: &PseudoOrbit<S::Point>) -> String {
    let mut s = format!("k,symbol,{},step_error\n", space.point_header().join(","));
    for (k, (sym, p)) in po.symbols.iter().zip(&po.points).enumerate() {
        let err = po.step_errors.get(k).map(|e| e.to_string()).unwrap_or_default();
        s += &format!("{k},{sym},{},{err}\n", space.point_fields(p).join(","));
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{AffineContraction, GridSet};
    use crate::space::GridSpace;

    fn global_two_map(level: u8) -> LocalIfs<GridSpace> {
        let sp = GridSpace::new(2, level).unwrap();
        let f1 = AffineContraction::similarity(0.4, [0.05, 0.3]).unwrap();
        let f2 = AffineContraction::similarity(0.4, [0.55, 0.3]).unwrap();
        let full = GridSet::full(2, level).unwrap();
        LocalIfs::new(sp, vec![f1, f2], vec![full.clone(), full]).unwrap()
    }

    #[test]
    fn l1_bound_arithmetic() {
        assert_eq!(l1_bound(0.0, 0.5, 3, 0.0).unwrap(), 0.0);
        let v = l1_bound(0.01, 0.5, 10, 1.0).unwrap();
        assert!((v - (0.02 + 2f64.powi(-10))).abs() < 1e-15);
        assert!((l1_bound(0.01, 0.5, 2000, 1.0).unwrap() - 0.02).abs() < 1e-15);
        assert!(matches!(l1_bound(0.1, 1.0, 1, 0.0), Err(ShadowError::BadRate(_))));
    }

    #[test]
    fn pseudo_orbit_is_verified_and_seeded() {
        let ifs = global_two_map(7);
        let a = ifs.attractor(100, 0.0).unwrap().set;
        let word: Vec<u8> = (0..30).map(|k| (k % 3 == 0) as u8).collect();
        let p = make_pseudo_orbit(&ifs, &a, &word, 0.02, 5).unwrap();
        assert!(p.verified);
        assert!(p.max_step_error() < 0.02);
        assert_eq!(p, make_pseudo_orbit(&ifs, &a, &word, 0.02, 5).unwrap());
    }

    #[test]
    fn true_orbit_shadows_itself() {
        let ifs = global_two_map(7);
        let word = vec![0, 1, 1, 0, 1];
        let po = true_orbit(&ifs, &word, &[0.3, 0.7], 0.01).unwrap();
        let r = shadow_search(&ifs, &po, 1e-9).unwrap();
        match r.status {
            ShadowStatus::ShadowFound { witness, achieved, .. } => {
                assert_eq!(witness, [0.3, 0.7]);
                assert_eq!(achieved, 0.0);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn global_ifs_shadows_from_the_start() {
        let ifs = global_two_map(7);
        let a = ifs.attractor(100, 0.0).unwrap().set;
        let word: Vec<u8> = (0..40).map(|k| ((k * 7) % 5 < 2) as u8).collect();
        let delta = 0.01;
        let po = make_pseudo_orbit(&ifs, &a, &word, delta, 11).unwrap();
        let eps = 1.05 * delta / (1.0 - 0.4);
        let r = shadow_search(&ifs, &po, eps).unwrap();
        let ShadowStatus::ShadowFound { witness, .. } = &r.status else { panic!("{r:?}") };
        assert_eq!(witness, &po.points[0]);
        assert!(verify_witness(&ifs, &po, witness, eps));
    }

    #[test]
    fn skew_orbit_matches_composition() {
        let ifs = global_two_map(6);
        let word = vec![1, 0, 0, 1, 1, 0];
        let pts = orbit(&ifs, &word, &[0.2, 0.9]).unwrap();
        let mut y = [0.2, 0.9];
        for (k, &s) in word.iter().enumerate() {
            y = ifs.map(s as usize).apply(y);
            assert_eq!(pts[k + 1], y);
        }
    }

    #[test]
    fn domain_exit_is_reported_at_its_step() {
        let sp = GridSpace::new(2, 6).unwrap();
        let f1 = AffineContraction::similarity(0.5, [0.5, 0.5]).unwrap();
        let f2 = AffineContraction::similarity(0.5, [0.0, 0.0]).unwrap();
        let x1 = GridSet::full(2, 6).unwrap();
        let x2 = GridSet::from_box(2, 6, [0.0, 0.0], [0.25, 0.25]).unwrap();
        let ifs = LocalIfs::new(sp, vec![f1, f2], vec![x1, x2]).unwrap();
        let err = orbit(&ifs, &[1, 0, 1, 1], &[0.1, 0.1]).unwrap_err();
        assert!(matches!(err, ShadowError::DomainViolation { step: 2, symbol: 1 }), "{err:?}");
    }

    #[test]
    fn gamma_monotone_in_delta_and_equal_at_zero() {
        let sp = GridSpace::new(2, 6).unwrap();
        let f1 = AffineContraction::similarity(0.5, [0.0, 0.0]).unwrap();
        let f2 = AffineContraction::similarity(0.5, [0.5, 0.25]).unwrap();
        let x1 = GridSet::from_box(2, 6, [0.0, 0.0], [0.6, 1.0]).unwrap();
        let x2 = GridSet::from_box(2, 6, [0.3, 0.0], [1.0, 0.5]).unwrap();
        let ifs = LocalIfs::new(sp, vec![f1, f2], vec![x1, x2]).unwrap();
        let a = [1, 0, 1, 1, 0, 1];
        assert_eq!(gamma_zero_set(&ifs, &a, 0.0).unwrap(), ifs.orbit_domain(&a).unwrap());
        let small = gamma_zero_set(&ifs, &a, 0.02).unwrap();
        let big = gamma_zero_set(&ifs, &a, 0.1).unwrap();
        assert!(small.is_subset(&big).unwrap());
        assert!(ifs.orbit_domain(&a).unwrap().is_subset(&small).unwrap());
    }

    #[test]
    fn witness_sets_decrease() {
        let ifs = global_two_map(6);
        let a = ifs.attractor(100, 0.0).unwrap().set;
        let word: Vec<u8> = (0..12).map(|k| (k % 2) as u8).collect();
        let po = make_pseudo_orbit(&ifs, &a, &word, 0.02, 3).unwrap();
        let e = witness_sets(&ifs, &po, 0.06);
        assert!(!e.last().unwrap().is_empty());
        for w in e.windows(2) {
            assert!(w[1].is_subset(&w[0]).unwrap());
        }
    }
}
