//! Exact squared Euclidean distance transform in cell units
//! (Felzenszwalb–Huttenlocher lower envelope of parabolas).

use rayon::prelude::*;

pub(crate) const INF: f64 = 1e30;

/// One-dimensional transform of `f` in place: `f[q] <- min_p (q - p)^2 + f[p]`.
fn transform_line(f: &mut [f64], v: &mut [usize], z: &mut [f64], out: &mut [f64]) {
    let n = f.len();
    if n == 0 {
        return;
    }
    if f.iter().all(|&x| x >= INF) {
        return;
    }
    let mut k = 0usize;
    let mut first = 0;
    while first < n && f[first] >= INF {
        first += 1;
    }
    v[0] = first;
    z[0] = f64::NEG_INFINITY;
    z[1] = f64::INFINITY;
    for q in (first + 1)..n {
        if f[q] >= INF {
            continue;
        }
        let meet = |p: usize| {
            ((f[q] + (q * q) as f64) - (f[p] + (p * p) as f64)) / (2.0 * (q as f64 - p as f64))
        };
        let mut s = meet(v[k]);
        while s <= z[k] {
            k -= 1;
            s = meet(v[k]);
        }
        k += 1;
        v[k] = q;
        z[k] = s;
        z[k + 1] = f64::INFINITY;
    }
    k = 0;
    for (q, o) in out.iter_mut().enumerate() {
        while z[k + 1] < q as f64 {
            k += 1;
        }
        let p = v[k];
        let d = q as f64 - p as f64;
        *o = d * d + f[p];
    }
    f.copy_from_slice(out);
}

/// Squared distance (in cell units) from every cell of a `width x height` grid to the
/// nearest seed cell. Cells with no seed anywhere get `INF`.
pub(crate) fn squared_edt(seeds: impl Fn(usize, usize) -> bool + Sync, width: usize, height: usize) -> Vec<f64> {
    let mut grid = vec![INF; width * height];
    grid.par_chunks_mut(width).enumerate().for_each(|(y, row)| {
        for (x, c) in row.iter_mut().enumerate() {
            if seeds(x, y) {
                *c = 0.0;
            }
        }
        let mut v = vec![0usize; width];
        let mut z = vec![0.0; width + 1];
        let mut out = vec![0.0; width];
        transform_line(row, &mut v, &mut z, &mut out);
    });
    if height > 1 {
        let mut cols: Vec<Vec<f64>> = (0..width)
            .into_par_iter()
            .map(|x| {
                let mut col: Vec<f64> = (0..height).map(|y| grid[y * width + x]).collect();
                let mut v = vec![0usize; height];
                let mut z = vec![0.0; height + 1];
                let mut out = vec![0.0; height];
                transform_line(&mut col, &mut v, &mut z, &mut out);
                col
            })
            .collect();
        for (x, col) in cols.iter_mut().enumerate() {
            for (y, value) in col.iter().enumerate() {
                grid[y * width + x] = *value;
            }
        }
    }
    grid
}
