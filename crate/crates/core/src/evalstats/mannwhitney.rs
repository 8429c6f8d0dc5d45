use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{ensure, Result};

/// Largest pooled sample size handled by exact enumeration.
pub const EXACT_LIMIT: usize = 16;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MwMode {
    Exact,
    NormalApprox,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MwResult {
    /// U statistic of the first sample.
    pub u: f64,
    pub p_two_sided: f64,
    /// Mode actually used; exact requests above the size limit fall back.
    pub mode: MwMode,
}

/// Twice the midrank of every pooled value, so ties stay integral.
fn doubled_midranks(pooled: &[f64]) -> Vec<u64> {
    let mut idx: Vec<usize> = (0..pooled.len()).collect();
    idx.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0; pooled.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && pooled[idx[j + 1]] == pooled[idx[i]] {
            j += 1;
        }
        // Positions i..=j (0-based) share rank ((i+1) + (j+1)) / 2.
        let r2 = (i + j + 2) as u64;
        for &k in &idx[i..=j] {
            ranks[k] = r2;
        }
        i = j + 1;
    }
    ranks
}

fn tie_sizes(pooled: &[f64]) -> Vec<usize> {
    let mut v = pooled.to_vec();
    v.sort_by(f64::total_cmp);
    let mut sizes = Vec::new();
    let mut i = 0;
    while i < v.len() {
        let j = v[i..].iter().take_while(|&&x| x == v[i]).count();
        sizes.push(j);
        i += j;
    }
    sizes
}

/// `counts[s]` = number of ways to pick `k` of the ranks with doubled sum `s`.
fn subset_sum_counts(ranks: &[u64], k: usize) -> Vec<u64> {
    let max: u64 = ranks.iter().sum();
    let mut dp = vec![vec![0u64; max as usize + 1]; k + 1];
    dp[0][0] = 1;
    for &r in ranks {
        for j in (1..=k).rev() {
            for s in (r as usize..=max as usize).rev() {
                dp[j][s] += dp[j - 1][s - r as usize];
            }
        }
    }
    dp.swap_remove(k)
}

/// Permutation distribution of U for the first sample, as `(u, probability)`
/// pairs in increasing `u`. Ties are handled with midranks.
pub fn exact_distribution(a: &[f64], b: &[f64]) -> Result<Vec<(f64, f64)>> {
    ensure!(
        !a.is_empty() && !b.is_empty(),
        "both samples must be non-empty"
    );
    ensure!(
        a.len() + b.len() <= EXACT_LIMIT,
        "exact distribution limited to {EXACT_LIMIT} pooled values"
    );
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let counts = subset_sum_counts(&ranks, a.len());
    let total: u64 = counts.iter().sum();
    let n1 = a.len() as f64;
    Ok(counts
        .iter()
        .enumerate()
        .filter(|(_, &c)| c > 0)
        .map(|(s, &c)| {
            (
                s as f64 / 2.0 - n1 * (n1 + 1.0) / 2.0,
                c as f64 / total as f64,
            )
        })
        .collect())
}

/// Two-sided Mann-Whitney U test.
///
/// The two-sided p counts every arrangement at least as far from the null
/// mean as the observed one. In approximate mode the variance carries the tie
/// correction and `|U - mean|` is reduced by 0.5 before standardizing.
pub fn mann_whitney_u(a: &[f64], b: &[f64], mode: MwMode) -> Result<MwResult> {
    ensure!(
        !a.is_empty() && !b.is_empty(),
        "both samples must be non-empty"
    );
    ensure!(
        a.iter().chain(b).all(|v| v.is_finite()),
        "samples must be finite"
    );
    let (n1, n2) = (a.len(), b.len());
    let n = n1 + n2;
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let ranks = doubled_midranks(&pooled);
    let t_obs: u64 = ranks[..n1].iter().sum();
    let u = t_obs as f64 / 2.0 - (n1 * (n1 + 1)) as f64 / 2.0;

    let mode = if mode == MwMode::Exact && n > EXACT_LIMIT {
        MwMode::NormalApprox
    } else {
        mode
    };

    let p = match mode {
        MwMode::Exact => {
            let counts = subset_sum_counts(&ranks, n1);
            let total: u64 = counts.iter().sum();
            // Centre of the doubled rank sum is n1 (n + 1).
            let centre = (n1 * (n + 1)) as i64;
            let dev = (t_obs as i64 - centre).abs();
            let extreme: u64 = counts
                .iter()
                .enumerate()
                .filter(|(s, _)| (*s as i64 - centre).abs() >= dev)
                .map(|(_, &c)| c)
                .sum();
            extreme as f64 / total as f64
        }
        MwMode::NormalApprox => {
            let nf = n as f64;
            let mean = (n1 * n2) as f64 / 2.0;
            let ties: f64 = tie_sizes(&pooled)
                .iter()
                .map(|&t| (t * t * t - t) as f64)
                .sum();
            let var = (n1 * n2) as f64 / 12.0 * ((nf + 1.0) - ties / (nf * (nf - 1.0)));
            if var <= 0.0 {
                1.0
            } else {
                let z = ((u - mean).abs() - 0.5).max(0.0) / var.sqrt();
                2.0 * Normal::standard().sf(z)
            }
        }
    };
    Ok(MwResult {
        u,
        p_two_sided: p.clamp(0.0, 1.0),
        mode,
    })
}
