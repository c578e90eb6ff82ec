use super::normal::Tail;
use super::result::{Moments, TrendTestResult};
use super::sample::RankedSample;
use crate::error::Result;

/// Concordant and discordant pair counts over all `N(N-1)/2` pairs.
/// Pairs tied in `x` or `y` are neither.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PairCounts {
    pub concordant: u64,
    pub discordant: u64,
    pub pairs: u64,
}

impl PairCounts {
    pub fn score(&self) -> i64 {
        self.concordant as i64 - self.discordant as i64
    }
}

fn tied_pairs<T, F: Fn(&T, &T) -> bool>(sorted: &[T], same: F) -> u64 {
    let mut total = 0u64;
    let mut run = 1u64;
    for w in sorted.windows(2) {
        if same(&w[0], &w[1]) {
            run += 1;
        } else {
            total += run * (run - 1) / 2;
            run = 1;
        }
    }
    total + run * (run - 1) / 2
}

/// Sorts `v` and returns the number of strict inversions it contained.
fn merge_count(v: &mut [f64], buf: &mut Vec<f64>) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut swaps = merge_count(&mut v[..mid], buf) + merge_count(&mut v[mid..], buf);
    buf.clear();
    let (mut i, mut j) = (0, mid);
    while i < mid && j < n {
        if v[j] < v[i] {
            swaps += (mid - i) as u64;
            buf.push(v[j]);
            j += 1;
        } else {
            buf.push(v[i]);
            i += 1;
        }
    }
    buf.extend_from_slice(&v[i..mid]);
    buf.extend_from_slice(&v[j..n]);
    v.copy_from_slice(buf);
    swaps
}

/// Pair counts in `O(N log N)` (Knight's merge-sort algorithm).
pub fn pair_counts(x: &[f64], y: &[f64]) -> PairCounts {
    assert_eq!(x.len(), y.len());
    let n = x.len() as u64;
    let mut pairs: Vec<(f64, f64)> = x.iter().copied().zip(y.iter().copied()).collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    let total = n * n.saturating_sub(1) / 2;
    let tied_x = tied_pairs(&pairs, |a, b| a.0 == b.0);
    let tied_xy = tied_pairs(&pairs, |a, b| a.0 == b.0 && a.1 == b.1);
    let mut ys: Vec<f64> = pairs.iter().map(|p| p.1).collect();
    let mut buf = Vec::with_capacity(ys.len());
    let discordant = merge_count(&mut ys, &mut buf);
    let tied_y = tied_pairs(&ys, |a, b| a == b);
    let untied = total - tied_x - tied_y + tied_xy;
    PairCounts {
        concordant: untied - discordant,
        discordant,
        pairs: total,
    }
}

/// Null variance of τ without tie correction: `2(2N+5) / (9N(N-1))`.
pub fn tau_variance(n: usize) -> f64 {
    let n = n as f64;
    2.0 * (2.0 * n + 5.0) / (9.0 * n * (n - 1.0))
}

/// Kendall τ-a with its normal-approximation test.
pub fn kendall_tau(sample: &RankedSample, tail: Tail, alpha: f64) -> Result<TrendTestResult> {
    let n = sample.len();
    if n < 10 {
        log::warn!("Kendall tau on {n} observations: the normal approximation is unreliable below 10");
    }
    let counts = pair_counts(sample.x(), sample.y());
    let tau = counts.score() as f64 / counts.pairs as f64;
    TrendTestResult::standardise(
        "kendall-tau",
        tau,
        0.0,
        tau_variance(n),
        tail,
        alpha,
        Moments::ClosedForm,
    )
}
