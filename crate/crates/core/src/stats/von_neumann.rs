//! Von Neumann ratio tests of serial independence.

use statrs::statistics::{Data, OrderStatistics, RankTieBreaker};

use crate::error::{ensure, Result};

/// Randomness threshold for the rank ratio at roughly 100 observations per
/// series (5% left tail).
pub const RVN_RANDOMNESS_THRESHOLD: f64 = 1.67;

/// `δ²/s²` with `δ² = Σ(y_{n+1}-y_n)²/(N-1)` and the biased `s² = Σ(y_n-ȳ)²/N`.
pub fn von_neumann(series: &[f64]) -> Result<f64> {
    let n = series.len();
    ensure!(n >= 3, "the von Neumann ratio needs at least 3 observations, got {n}");
    let mean = series.iter().sum::<f64>() / n as f64;
    let s2 = series.iter().map(|y| (y - mean).powi(2)).sum::<f64>() / n as f64;
    ensure!(s2 > 0.0, "series has zero variance");
    let d2 = series.windows(2).map(|w| (w[1] - w[0]).powi(2)).sum::<f64>() / (n - 1) as f64;
    Ok(d2 / s2)
}

/// Residuals after subtracting the least-squares line in the index `n`.
pub fn detrend(series: &[f64]) -> Vec<f64> {
    let n = series.len() as f64;
    let t_mean = (n - 1.0) / 2.0;
    let y_mean = series.iter().sum::<f64>() / n;
    let (mut sty, mut stt) = (0.0, 0.0);
    for (i, y) in series.iter().enumerate() {
        let dt = i as f64 - t_mean;
        sty += dt * (y - y_mean);
        stt += dt * dt;
    }
    let slope = if stt > 0.0 { sty / stt } else { 0.0 };
    series
        .iter()
        .enumerate()
        .map(|(i, y)| y - y_mean - slope * (i as f64 - t_mean))
        .collect()
}

/// Ascending ranks starting at 1, ties receiving their average rank.
pub fn average_ranks(series: &[f64]) -> Vec<f64> {
    Data::new(series.to_vec()).ranks(RankTieBreaker::Average)
}

/// `Σ_{n<N}(r_n - r_{n+1})² / Σ_n (r_n - r̄)²` over the ranks of the
/// (optionally detrended) series.
pub fn rank_von_neumann(series: &[f64], detrended: bool) -> Result<f64> {
    let n = series.len();
    ensure!(n >= 10, "the rank von Neumann ratio needs at least 10 observations, got {n}");
    ensure!(
        series.iter().all(|v| v.is_finite()),
        "series must be finite"
    );
    ensure!(
        series.iter().any(|&v| v != series[0]),
        "series is constant"
    );
    let values = if detrended { detrend(series) } else { series.to_vec() };
    let ranks = average_ranks(&values);
    let mean = ranks.iter().sum::<f64>() / n as f64;
    let den: f64 = ranks.iter().map(|r| (r - mean).powi(2)).sum();
    ensure!(den > 0.0, "ranks have zero spread");
    let num: f64 = ranks.windows(2).map(|w| (w[0] - w[1]).powi(2)).sum();
    Ok(num / den)
}
