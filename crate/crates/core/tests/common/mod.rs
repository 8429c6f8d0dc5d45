//! Reference implementations shared by the integration targets. They are
//! deliberately naive so they can be checked by eye.
#![allow(dead_code)]

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tfdkit::sigcore::Complex64;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_real(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| rng.random_range(-1.0..1.0)).collect()
}

/// O(N²) forward DFT, `X[k] = Σ x[n] e^{-2πikn/N}`.
pub fn naive_dft(x: &[Complex64]) -> Vec<Complex64> {
    let n = x.len();
    (0..n)
        .map(|k| {
            x.iter()
                .enumerate()
                .map(|(t, v)| {
                    // reduce the product first so the phase stays accurate for large N
                    let phase = -2.0 * PI * ((k * t) % n) as f64 / n as f64;
                    v * Complex64::from_polar(1.0, phase)
                })
                .sum()
        })
        .collect()
}

/// U statistic of `a` by pairwise comparison, ties counting one half.
pub fn pairwise_u(a: &[f64], b: &[f64]) -> f64 {
    let mut u = 0.0;
    for &x in a {
        for &y in b {
            if x > y {
                u += 1.0;
            } else if x == y {
                u += 0.5;
            }
        }
    }
    u
}

/// Two-sided permutation p-value over every relabelling of the pooled sample.
pub fn brute_force_p(a: &[f64], b: &[f64]) -> f64 {
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let n = pooled.len();
    let n1 = a.len();
    let centre = (n1 * b.len()) as f64 / 2.0;
    let observed = (pairwise_u(a, b) - centre).abs();
    let (mut hits, mut total) = (0u64, 0u64);
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != n1 {
            continue;
        }
        let (mut xa, mut xb) = (Vec::new(), Vec::new());
        for (i, &v) in pooled.iter().enumerate() {
            if mask & (1 << i) != 0 {
                xa.push(v);
            } else {
                xb.push(v);
            }
        }
        total += 1;
        if (pairwise_u(&xa, &xb) - centre).abs() >= observed - 1e-9 {
            hits += 1;
        }
    }
    hits as f64 / total as f64
}

/// Every file below `root` as a path relative to it, sorted.
pub fn walk(root: &Path) -> Vec<PathBuf> {
    fn go(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        let mut entries: Vec<_> = fs::read_dir(dir)
            .unwrap()
            .map(|e| e.unwrap().path())
            .collect();
        entries.sort();
        for p in entries {
            if p.is_dir() {
                go(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    go(root, root, &mut out);
    out
}

/// First differing relative path between two trees, if any.
pub fn tree_difference(a: &Path, b: &Path) -> Option<String> {
    let fa = walk(a);
    let fb = walk(b);
    if fa != fb {
        return Some(format!(
            "file lists differ ({} vs {} files)",
            fa.len(),
            fb.len()
        ));
    }
    fa.into_iter()
        .find(|p| fs::read(a.join(p)).unwrap() != fs::read(b.join(p)).unwrap())
        .map(|p| format!("{} differs", p.display()))
}

/// Width at half maximum around the peak of `row`, with linear interpolation
/// of both crossings.
pub fn half_max_width(row: &[f64]) -> f64 {
    let (peak, &max) = row
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.total_cmp(b.1))
        .unwrap();
    let half = max / 2.0;
    let mut lo = peak;
    while lo > 0 && row[lo - 1] > half {
        lo -= 1;
    }
    let left = if lo == 0 {
        0.0
    } else {
        lo as f64 - (row[lo] - half) / (row[lo] - row[lo - 1])
    };
    let mut hi = peak;
    while hi + 1 < row.len() && row[hi + 1] > half {
        hi += 1;
    }
    let right = if hi + 1 == row.len() {
        hi as f64
    } else {
        hi as f64 + (row[hi] - half) / (row[hi] - row[hi + 1])
    };
    right - left
}
