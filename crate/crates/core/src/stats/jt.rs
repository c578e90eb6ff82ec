//! Jonckheere-Terpstra test for ordered medians across pre-ordered groups.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::normal::Tail;
use super::result::{Moments, TrendTestResult};
use super::sample::GroupedSample;
use crate::error::{ensure, Result};

/// Definition of the per-pair weight in the summed Mann-Whitney statistic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum JtVariant {
    /// `U = Σ_{i<j} U_ij`.
    #[default]
    Plain,
    /// `U_ij` scaled by the group spacing `j - i`.
    SpacingWeighted,
    /// Each counted pair weighted by its rank difference in the pooled data.
    RankWeighted,
}

impl std::str::FromStr for JtVariant {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "plain" => Ok(JtVariant::Plain),
            "spacing" | "spacing_weighted" | "spacing-weighted" => Ok(JtVariant::SpacingWeighted),
            "rank" | "rank_weighted" | "rank-weighted" => Ok(JtVariant::RankWeighted),
            other => Err(format!(
                "unknown JT variant '{other}' (expected plain|spacing|rank)"
            )),
        }
    }
}

impl std::fmt::Display for JtVariant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            JtVariant::Plain => "plain",
            JtVariant::SpacingWeighted => "spacing",
            JtVariant::RankWeighted => "rank",
        })
    }
}

/// Fenwick tree over dense value positions.
struct Fenwick {
    tree: Vec<f64>,
}

impl Fenwick {
    fn new(n: usize) -> Self {
        Self { tree: vec![0.0; n + 1] }
    }

    fn add(&mut self, pos: usize, v: f64) {
        let mut i = pos + 1;
        while i < self.tree.len() {
            self.tree[i] += v;
            i += i & i.wrapping_neg();
        }
    }

    /// Sum over positions `< pos`.
    fn below(&self, pos: usize) -> f64 {
        let mut i = pos;
        let mut s = 0.0;
        while i > 0 {
            s += self.tree[i];
            i -= i & i.wrapping_neg();
        }
        s
    }

    fn at(&self, pos: usize) -> f64 {
        self.below(pos + 1) - self.below(pos)
    }
}

/// Dense positions of the distinct values, and average ranks, of pooled data.
fn positions_and_ranks(pooled: &[f64]) -> (Vec<usize>, Vec<f64>, usize) {
    let mut order: Vec<usize> = (0..pooled.len()).collect();
    order.sort_by(|&a, &b| pooled[a].total_cmp(&pooled[b]));
    let mut pos = vec![0; pooled.len()];
    let mut rank = vec![0.0; pooled.len()];
    let mut distinct = 0;
    let mut i = 0;
    while i < order.len() {
        let mut j = i;
        while j + 1 < order.len() && pooled[order[j + 1]] == pooled[order[i]] {
            j += 1;
        }
        let avg = (i + j) as f64 / 2.0 + 1.0;
        for &k in &order[i..=j] {
            pos[k] = distinct;
            rank[k] = avg;
        }
        distinct += 1;
        i = j + 1;
    }
    (pos, rank, distinct)
}

/// The JT statistic of `groups` for the given variant, with ties counted ½.
pub fn jt_statistic(groups: &[Vec<f64>], variant: JtVariant) -> f64 {
    let pooled: Vec<f64> = groups.iter().flatten().copied().collect();
    let (pos, rank, distinct) = positions_and_ranks(&pooled);
    let mut count = Fenwick::new(distinct);
    let mut weight = Fenwick::new(distinct);
    let mut u = 0.0;
    let mut offset = 0;
    for (j, group) in groups.iter().enumerate() {
        let idx = offset..offset + group.len();
        for k in idx.clone() {
            let p = pos[k];
            let less = count.below(p);
            let equal = count.at(p);
            u += match variant {
                JtVariant::Plain => less + 0.5 * equal,
                JtVariant::SpacingWeighted => {
                    let jf = j as f64;
                    (jf * less - weight.below(p)) + 0.5 * (jf * equal - weight.at(p))
                }
                // equal values share a rank, so ties carry zero weight
                JtVariant::RankWeighted => rank[k] * less - weight.below(p),
            };
        }
        for k in idx {
            count.add(pos[k], 1.0);
            let w = match variant {
                JtVariant::Plain => 0.0,
                JtVariant::SpacingWeighted => j as f64,
                JtVariant::RankWeighted => rank[k],
            };
            weight.add(pos[k], w);
        }
        offset += group.len();
    }
    u
}

/// Null mean and variance of the plain statistic (no tie correction):
/// `μ = (N² - Σ N_i²)/4`, `σ² = (N²(2N+3) - Σ N_i²(2N_i+3))/72`.
pub fn jt_moments(sizes: &[usize]) -> (f64, f64) {
    let n: f64 = sizes.iter().sum::<usize>() as f64;
    let sq: f64 = sizes.iter().map(|&s| (s * s) as f64).sum();
    let cub: f64 = sizes
        .iter()
        .map(|&s| {
            let s = s as f64;
            s * s * (2.0 * s + 3.0)
        })
        .sum();
    ((n * n - sq) / 4.0, (n * n * (2.0 * n + 3.0) - cub) / 72.0)
}

fn check_groups(groups: &GroupedSample) -> Result<()> {
    ensure!(
        groups.group_count() >= 2,
        "the Jonckheere-Terpstra test needs at least 2 groups, got {}",
        groups.group_count()
    );
    Ok(())
}

/// Jonckheere-Terpstra test with closed-form null moments.
pub fn jt_test(groups: &GroupedSample, tail: Tail, alpha: f64) -> Result<TrendTestResult> {
    check_groups(groups)?;
    let u = jt_statistic(groups.groups(), JtVariant::Plain);
    let (mean, variance) = jt_moments(&groups.sizes());
    TrendTestResult::standardise("jonckheere-terpstra", u, mean, variance, tail, alpha, Moments::ClosedForm)
}

/// Seeded permutation settings for Monte Carlo null moments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Permutation {
    pub shuffles: usize,
    pub seed: u64,
}

impl Default for Permutation {
    fn default() -> Self {
        Self {
            shuffles: 10_000,
            seed: 0x4a54_7065_726d,
        }
    }
}

/// Statistic values over `shuffles` random reassignments of the pooled
/// observations to groups of the same sizes. Shuffle `k` draws from its own
/// ChaCha stream, so the result does not depend on scheduling.
pub fn permutation_statistics(groups: &GroupedSample, variant: JtVariant, perm: Permutation) -> Vec<f64> {
    let pooled: Vec<f64> = groups.groups().iter().flatten().copied().collect();
    let one = |k: usize| {
        let mut rng = ChaCha8Rng::seed_from_u64(perm.seed);
        rng.set_stream(k as u64);
        let mut shuffled = pooled.clone();
        shuffled.shuffle(&mut rng);
        jt_statistic(&groups.regroup(&shuffled), variant)
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        (0..perm.shuffles).into_par_iter().map(one).collect()
    }
    #[cfg(not(feature = "parallel"))]
    {
        (0..perm.shuffles).map(one).collect()
    }
}

/// Sample mean and (unbiased) variance.
pub(crate) fn mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// Variant JT test. The plain variant uses the closed-form moments and is
/// identical to [`jt_test`]; the weighted variants are standardised by
/// permutation moments.
pub fn jt_variant(
    groups: &GroupedSample,
    variant: JtVariant,
    tail: Tail,
    alpha: f64,
    perm: Permutation,
) -> Result<TrendTestResult> {
    if variant == JtVariant::Plain {
        return jt_test(groups, tail, alpha);
    }
    check_groups(groups)?;
    ensure!(perm.shuffles >= 2, "need at least 2 shuffles for permutation moments");
    let u = jt_statistic(groups.groups(), variant);
    let (mean, variance) = mean_variance(&permutation_statistics(groups, variant, perm));
    TrendTestResult::standardise(
        format!("jonckheere-terpstra-{variant}"),
        u,
        mean,
        variance,
        tail,
        alpha,
        Moments::MonteCarlo {
            shuffles: perm.shuffles,
        },
    )
}
