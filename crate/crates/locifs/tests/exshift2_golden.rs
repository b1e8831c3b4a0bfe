//! `exshift2` against a recorded golden file and a brute-force cylinder oracle.
//!
//! The oracle enumerates binary words of a fixed length, runs the true orbit along the
//! word `(2, 0^{m-2}, 2, 2, …)` with its own implementation of the three maps, and
//! measures the distance from the pseudo-orbit start `010…` to the surviving starts.
//! Zeroing a tail never creates a symbol above 1, so the truncation of every admissible
//! start is itself admissible and the enumeration is exact above `2^{-(L+1)}`.

use locifs::scenarios::{exshift2, exshift2_gap_curve, exshift2_pseudo_orbit, exshift2_word};
use locifs::shadowing::shadow_search;

const WINDOW: u8 = 16;
const HORIZON: usize = 32;
const ORACLE_LEN: usize = 14;
const GOLDEN: &str = include_str!("golden/exshift2_gap.csv");

fn apply(symbol: u8, x: &[u8]) -> Vec<u8> {
    match symbol {
        0 | 1 => std::iter::once(symbol).chain(x.iter().copied()).collect(),
        _ => {
            let at = |i: usize| x.get(i).copied().unwrap_or(0);
            [0, 0].into_iter().chain((0..x.len()).map(|i| at(i) + at(i + 1))).collect()
        }
    }
}

fn distance(x: &[u8], y: &[u8]) -> f64 {
    let n = x.len().max(y.len());
    (0..n)
        .find(|&i| x.get(i).copied().unwrap_or(0) != y.get(i).copied().unwrap_or(0))
        .map_or(0.0, |i| 0.5f64.powi(i as i32 + 1))
}

fn survives(word: &[u8], x: &[u8]) -> bool {
    let mut y = x.to_vec();
    for &s in word {
        if y.iter().any(|&c| c > 1) {
            return false;
        }
        y = apply(s, &y);
    }
    true
}

/// Distance from `010…` to the set of true-orbit starts along `word`.
fn oracle_bound(word: &[u8]) -> f64 {
    let x0 = [0u8, 1];
    (0..1u32 << ORACLE_LEN)
        .map(|bits| (0..ORACLE_LEN).map(|i| (bits >> i & 1) as u8).collect::<Vec<u8>>())
        .filter(|x| survives(word, x))
        .map(|x| distance(&x0, &x))
        .fold(f64::INFINITY, f64::min)
}

struct Row {
    m: u32,
    delta: f64,
    gap: f64,
    oracle: f64,
}

fn golden() -> Vec<Row> {
    GOLDEN
        .lines()
        .skip(1)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            Row { m: f[0].parse().unwrap(), delta: f[1].parse().unwrap(), gap: f[2].parse().unwrap(), oracle: f[3].parse().unwrap() }
        })
        .collect()
}

#[test]
fn oracle_matches_golden() {
    for row in golden() {
        let bound = oracle_bound(&exshift2_word(row.m, HORIZON));
        assert!(bound > 0.5f64.powi(ORACLE_LEN as i32 + 1), "m = {}: enumeration too short", row.m);
        assert_eq!(bound, row.oracle, "m = {}", row.m);
    }
}

#[test]
fn gap_curve_matches_golden() {
    let ifs = exshift2(WINDOW).unwrap();
    let rows = golden();
    let ms: Vec<u32> = rows.iter().map(|r| r.m).collect();
    let curve = exshift2_gap_curve(&ifs, &ms, HORIZON).unwrap();
    for (p, row) in curve.points.iter().zip(&rows) {
        assert_eq!(p.delta, row.delta);
        assert!((p.gap - row.gap).abs() < 1e-12, "m = {}: {} vs {}", row.m, p.gap, row.gap);
        assert!(p.gap >= row.oracle, "m = {}", row.m);
    }
    let floor = rows.iter().map(|r| r.oracle).fold(f64::INFINITY, f64::min);
    assert!(floor > 0.0);
    assert!(curve.min_gap() >= floor);
}

#[test]
fn certified_none_above_oracle() {
    let ifs = exshift2(WINDOW).unwrap();
    for row in golden() {
        let po = exshift2_pseudo_orbit(&ifs, row.m, HORIZON).unwrap();
        assert!(po.verified);
        assert!(po.max_step_error() < row.delta);
        let r = shadow_search(&ifs, &po, 0.25).unwrap();
        assert!(r.is_certified_none(), "m = {}: {}", row.m, r.status_name());
        assert!(row.oracle >= 0.25);
    }
}
