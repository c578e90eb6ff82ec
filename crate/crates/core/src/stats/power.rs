use super::normal::{critical_value, lower_tail, upper_tail, Tail};
use crate::error::{ensure, Result};

/// Type II error and power of a right-tailed z-test against a unit-variance
/// normal alternative shifted by `mu_a`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerPoint {
    pub alpha: f64,
    pub mu_a: f64,
    pub beta: f64,
    pub power: f64,
}

/// `β = P(Z < Z_α - μ_A)`, power `1 - β`.
///
/// Under the normal approximation the sample size and bin layout cancel out
/// in the standardisation, so only `(α, μ_A)` enter.
pub fn power(alpha: f64, mu_a: f64) -> Result<PowerPoint> {
    ensure!(mu_a >= 0.0 && mu_a.is_finite(), "mu_A must be finite and >= 0, got {mu_a}");
    let z_alpha = critical_value(alpha, Tail::Right)?;
    if mu_a == 0.0 {
        // the null itself: power is the size, without round-off
        return Ok(PowerPoint {
            alpha,
            mu_a,
            beta: 1.0 - alpha,
            power: alpha,
        });
    }
    Ok(PowerPoint {
        alpha,
        mu_a,
        beta: lower_tail(z_alpha - mu_a),
        power: upper_tail(z_alpha - mu_a),
    })
}

/// Smallest `μ_A` whose power reaches `target`: `Z_α + Z_{1-target}`.
pub fn power_threshold(alpha: f64, target: f64) -> Result<f64> {
    ensure!(target > 0.0 && target < 1.0, "target power must lie in (0, 1), got {target}");
    let mu = critical_value(alpha, Tail::Right)? + critical_value(1.0 - target, Tail::Right)?;
    Ok(mu.max(0.0))
}

/// Power on an even grid `μ = 0, μ_max/steps, …, μ_max`.
pub fn power_curve(alpha: f64, mu_max: f64, steps: usize) -> Result<Vec<PowerPoint>> {
    ensure!(steps >= 1, "need at least one step");
    ensure!(mu_max > 0.0, "mu_max must be positive");
    (0..=steps)
        .map(|i| power(alpha, mu_max * i as f64 / steps as f64))
        .collect()
}
