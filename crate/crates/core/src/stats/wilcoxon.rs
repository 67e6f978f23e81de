use serde::Serialize;
use statrs::distribution::{ContinuousCDF, Normal};

use super::rank::average_ranks;
use crate::error::{Error, Result};

/// Largest number of nonzero differences for which the exact null
/// distribution is used.
pub const DEFAULT_EXACT_MAX_N: usize = 25;

const MIN_NONZERO: usize = 5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairedTestResult {
    /// Sum of the ranks of positive differences `a - b`.
    pub statistic_w: f64,
    pub p_two_sided: f64,
    /// `|Z| / sqrt(n)` with `Z` the uncorrected normal score of `W`.
    pub effect_r: f64,
    /// Pairs remaining after zero differences are dropped.
    pub n_effective: usize,
    pub exact: bool,
}

/// Number of sign assignments yielding each doubled rank sum, for integer
/// doubled ranks. Index `s` counts the subsets whose doubled ranks sum to `s`.
///
/// Equivalent to enumerating all `2^n` sign vectors, built one rank at a time.
pub fn exact_signed_rank_counts(doubled_ranks: &[u64]) -> Vec<u64> {
    let max: u64 = doubled_ranks.iter().sum();
    let mut counts = vec![0u64; max as usize + 1];
    counts[0] = 1;
    let mut reach = 0usize;
    for &r in doubled_ranks {
        let r = r as usize;
        for s in (0..=reach).rev() {
            if counts[s] > 0 {
                counts[s + r] += counts[s];
            }
        }
        reach += r;
    }
    counts
}

pub fn wilcoxon_signed_rank(pairs: &[(f64, f64)]) -> Result<PairedTestResult> {
    wilcoxon_signed_rank_with(pairs, DEFAULT_EXACT_MAX_N)
}

/// Two-sided Wilcoxon signed-rank test on paired samples.
///
/// Zero differences are dropped; ties in `|d|` get average ranks. Up to
/// `exact_max_n` remaining pairs the p-value comes from the exact permutation
/// distribution of `W` under random signs, beyond that from the tie-corrected
/// normal approximation without continuity correction.
pub fn wilcoxon_signed_rank_with(pairs: &[(f64, f64)], exact_max_n: usize) -> Result<PairedTestResult> {
    let diffs: Vec<f64> = pairs.iter().map(|(a, b)| a - b).filter(|d| *d != 0.0).collect();
    if diffs.iter().any(|d| !d.is_finite()) {
        return Err(Error::InvalidArgument("non-finite paired difference".into()));
    }
    let n = diffs.len();
    if n < MIN_NONZERO {
        return Err(Error::InsufficientData(format!(
            "{n} nonzero differences; at least {MIN_NONZERO} required"
        )));
    }

    let abs: Vec<f64> = diffs.iter().map(|d| d.abs()).collect();
    let ranks = average_ranks(&abs);
    let w: f64 = diffs.iter().zip(&ranks).filter(|(d, _)| **d > 0.0).map(|(_, r)| r).sum();

    let nf = n as f64;
    let mean_w = nf * (nf + 1.0) / 4.0;
    let var_w = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0;
    let effect_r = (w - mean_w).abs() / var_w.sqrt() / nf.sqrt();

    let (p, exact) = if n <= exact_max_n {
        // average ranks are multiples of 1/2
        let doubled: Vec<u64> = ranks.iter().map(|r| (2.0 * r).round() as u64).collect();
        let w2 = (2.0 * w).round() as usize;
        let counts = exact_signed_rank_counts(&doubled);
        let total = 2f64.powi(n as i32);
        let lower: u64 = counts[..=w2].iter().sum();
        let upper: u64 = counts[w2..].iter().sum();
        ((2.0 * lower.min(upper) as f64 / total).min(1.0), true)
    } else {
        let mut sorted = abs.clone();
        sorted.sort_by(f64::total_cmp);
        let mut tie_term = 0.0;
        let mut i = 0;
        while i < sorted.len() {
            let mut j = i + 1;
            while j < sorted.len() && sorted[j] == sorted[i] {
                j += 1;
            }
            let t = (j - i) as f64;
            tie_term += t * t * t - t;
            i = j;
        }
        let sd = (var_w - tie_term / 48.0).sqrt();
        let z = (w - mean_w) / sd;
        let normal = Normal::standard();
        ((2.0 * normal.sf(z.abs())).min(1.0), false)
    };

    Ok(PairedTestResult {
        statistic_w: w,
        p_two_sided: p,
        effect_r,
        n_effective: n,
        exact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn same_sign(n: usize) -> Vec<(f64, f64)> {
        (1..=n).map(|i| (10.0 + i as f64, 1.0)).collect()
    }

    #[test]
    fn ten_positive_pairs() {
        let res = wilcoxon_signed_rank(&same_sign(10)).unwrap();
        assert_eq!(res.p_two_sided, 2.0 / 1024.0);
        assert_eq!(res.statistic_w, 55.0);
        assert!((res.effect_r - 0.886).abs() < 1e-3, "{}", res.effect_r);
        assert!(res.exact);
    }

    #[test]
    fn nine_positive_pairs_after_dropping_a_zero() {
        let mut pairs = same_sign(9);
        pairs.push((3.0, 3.0));
        let res = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(res.n_effective, 9);
        assert_eq!(res.p_two_sided, 2.0 / 512.0);
        assert!((res.effect_r - 0.889).abs() < 1e-3, "{}", res.effect_r);
    }

    #[test]
    fn symmetric_differences_are_null() {
        let pairs: Vec<(f64, f64)> = (1..=6).flat_map(|i| [(i as f64, 0.0), (0.0, i as f64)]).collect();
        let res = wilcoxon_signed_rank(&pairs).unwrap();
        assert_eq!(res.statistic_w, 12.0 * 13.0 / 4.0);
        assert_eq!(res.p_two_sided, 1.0);
        assert_eq!(res.effect_r, 0.0);
    }

    #[test]
    fn counts_of_small_distribution() {
        // ranks 1, 2, 3: subset sums 0,1,2,3,3,4,5,6
        assert_eq!(exact_signed_rank_counts(&[2, 4, 6]), vec![1, 0, 1, 0, 1, 0, 2, 0, 1, 0, 1, 0, 1]);
    }

    #[test]
    fn too_few_nonzero_differences() {
        let pairs = [(1.0, 0.0), (2.0, 0.0), (3.0, 0.0), (4.0, 0.0), (5.0, 5.0)];
        assert!(matches!(wilcoxon_signed_rank(&pairs), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn normal_approximation_beyond_threshold() {
        let pairs = same_sign(30);
        let res = wilcoxon_signed_rank(&pairs).unwrap();
        assert!(!res.exact);
        // z = (465 - 232.5) / sqrt(2363.75)
        let z = 232.5 / 2363.75f64.sqrt();
        assert!((res.effect_r - z / 30f64.sqrt()).abs() < 1e-12);
        assert!(res.p_two_sided < 1e-5);
    }
}
