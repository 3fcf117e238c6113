//! Rank-sum testing and best-equivalence.

use statrs::distribution::{ContinuousCDF, Normal};

/// Samples per group up to which the exact null distribution is used.
pub const EXACT_LIMIT: usize = 8;

/// Mann-Whitney U comparison of two samples.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RankSumTest {
    /// `U` for the first sample: small when it tends to be smaller.
    pub u: f64,
    /// One-sided p-value for "the first sample tends to be smaller".
    pub p_less: f64,
    /// One-sided p-value for "the first sample tends to be larger".
    pub p_greater: f64,
    pub p_two_sided: f64,
    pub exact: bool,
}

/// Midranks (1-based) of the pooled sample and the tie group sizes.
fn midranks(pooled: &[f64]) -> (Vec<f64>, Vec<usize>) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut ranks = vec![0.0; pooled.len()];
    let mut ties = Vec::new();
    let mut i = 0;
    while i < order.len() {
        let mut j = i + 1;
        while j < order.len() && pooled[order[j]] == pooled[order[i]] {
            j += 1;
        }
        let rank = (i + j + 1) as f64 / 2.0;
        for &k in &order[i..j] {
            ranks[k] = rank;
        }
        if j - i > 1 {
            ties.push(j - i);
        }
        i = j;
    }
    (ranks, ties)
}

/// Number of arrangements giving each `U` for sample sizes `(m, n)`,
/// indexed by `U` in `0..=m*n`.
pub fn u_distribution(m: usize, n: usize) -> Vec<f64> {
    // counts[j][u] for the current m over every n' <= n
    let max_u = m * n;
    let mut prev: Vec<Vec<f64>> = (0..=n).map(|_| {
        let mut v = vec![0.0; max_u + 1];
        v[0] = 1.0;
        v
    }).collect();
    for mm in 1..=m {
        let mut cur: Vec<Vec<f64>> = vec![vec![0.0; max_u + 1]; n + 1];
        cur[0][0] = 1.0;
        for nn in 1..=n {
            for u in 0..=mm * nn {
                // largest pooled value belongs to the first sample (adds nn) or the second
                let with_first = if u >= nn { prev[nn][u - nn] } else { 0.0 };
                cur[nn][u] = with_first + cur[nn - 1][u];
            }
        }
        prev = cur;
    }
    prev.swap_remove(n)
}

/// Two-sample rank-sum test. Exact when the smaller sample has at most
/// [`EXACT_LIMIT`] values and there are no ties; otherwise the normal
/// approximation with tie and continuity corrections.
///
/// # Panics
/// If either sample is empty.
pub fn rank_sum_test(a: &[f64], b: &[f64]) -> RankSumTest {
    assert!(!a.is_empty() && !b.is_empty(), "rank-sum test needs two non-empty samples");
    let (m, n) = (a.len(), b.len());
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let r_a: f64 = ranks[..m].iter().sum();
    let u = r_a - (m * (m + 1)) as f64 / 2.0;

    if m.min(n) <= EXACT_LIMIT && ties.is_empty() {
        let dist = u_distribution(m, n);
        let total: f64 = dist.iter().sum();
        let k = u.round() as usize;
        let p_less = dist[..=k].iter().sum::<f64>() / total;
        let p_greater = dist[k..].iter().sum::<f64>() / total;
        return RankSumTest {
            u,
            p_less,
            p_greater,
            p_two_sided: (2.0 * p_less.min(p_greater)).min(1.0),
            exact: true,
        };
    }
    normal_approximation(u, m, n, &ties)
}

/// Rank-sum test by the normal approximation regardless of sample size.
///
/// # Panics
/// If either sample is empty.
pub fn rank_sum_normal(a: &[f64], b: &[f64]) -> RankSumTest {
    assert!(!a.is_empty() && !b.is_empty(), "rank-sum test needs two non-empty samples");
    let m = a.len();
    let pooled: Vec<f64> = a.iter().chain(b).copied().collect();
    let (ranks, ties) = midranks(&pooled);
    let u = ranks[..m].iter().sum::<f64>() - (m * (m + 1)) as f64 / 2.0;
    normal_approximation(u, m, b.len(), &ties)
}

fn normal_approximation(u: f64, m: usize, n: usize, ties: &[usize]) -> RankSumTest {
    let (mf, nf) = (m as f64, n as f64);
    let big_n = mf + nf;
    let mean = mf * nf / 2.0;
    let tie_term: f64 = ties.iter().map(|&t| (t * t * t - t) as f64).sum::<f64>()
        / (big_n * (big_n - 1.0));
    let var = mf * nf / 12.0 * ((big_n + 1.0) - tie_term);
    if var <= 0.0 {
        return RankSumTest {
            u,
            p_less: 1.0,
            p_greater: 1.0,
            p_two_sided: 1.0,
            exact: false,
        };
    }
    let sd = var.sqrt();
    let std = Normal::standard();
    let p_less = std.cdf((u - mean + 0.5) / sd).min(1.0);
    let p_greater = std.sf((u - mean - 0.5) / sd).min(1.0);
    RankSumTest {
        u,
        p_less,
        p_greater,
        p_two_sided: (2.0 * p_less.min(p_greater)).min(1.0),
        exact: false,
    }
}

/// Two-sided rank-sum p-value.
pub fn wilcoxon_rank_sum(a: &[f64], b: &[f64]) -> f64 {
    rank_sum_test(a, b).p_two_sided
}

/// Number of pairwise comparisons among `k` groups.
pub fn pair_count(k: usize) -> usize {
    k * k.saturating_sub(1) / 2
}

/// Flags the groups that no other group beats. Group `j` beats `i` when
/// the one-sided test "j smaller than i" rejects at `alpha`, divided by the
/// number of pairs when `bonferroni` is set.
pub fn best_equivalent(samples: &[Vec<f64>], alpha: f64, bonferroni: bool) -> Vec<bool> {
    let k = samples.len();
    let level = if bonferroni {
        alpha / pair_count(k).max(1) as f64
    } else {
        alpha
    };
    (0..k)
        .map(|i| {
            (0..k).all(|j| {
                j == i
                    || samples[i].is_empty()
                    || samples[j].is_empty()
                    || rank_sum_test(&samples[j], &samples[i]).p_less >= level
            }) && !samples[i].is_empty()
        })
        .collect()
}

/// Outcome of a one-to-one comparison at level `alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Comparison {
    Better,
    Equal,
    Worse,
}

/// Compare `a` with `b`: a significant two-sided difference decides the
/// direction by `U`.
pub fn compare(a: &[f64], b: &[f64], alpha: f64) -> Comparison {
    let t = rank_sum_test(a, b);
    if t.p_two_sided >= alpha {
        Comparison::Equal
    } else if t.u < (a.len() * b.len()) as f64 / 2.0 {
        Comparison::Better
    } else {
        Comparison::Worse
    }
}
