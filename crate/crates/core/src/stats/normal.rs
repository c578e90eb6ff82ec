//! Standard normal tail probabilities and critical values.

use std::f64::consts::{FRAC_1_SQRT_2, SQRT_2};

use statrs::function::erf::{erfc, erfc_inv};

use crate::error::{ensure, Result};

/// Which tail of the null distribution counts as evidence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum Tail {
    /// Increasing trend (`Ỹ_1 ≤ … ≤ Ỹ_I`).
    #[default]
    Right,
    /// Decreasing trend.
    Left,
}

impl std::fmt::Display for Tail {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Tail::Right => "right",
            Tail::Left => "left",
        })
    }
}

impl std::str::FromStr for Tail {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "right" => Ok(Tail::Right),
            "left" => Ok(Tail::Left),
            other => Err(format!("unknown tail '{other}' (expected right|left)")),
        }
    }
}

/// `P(Z > z)`.
pub fn upper_tail(z: f64) -> f64 {
    0.5 * erfc(z * FRAC_1_SQRT_2)
}

/// `P(Z < z)`.
pub fn lower_tail(z: f64) -> f64 {
    0.5 * erfc(-z * FRAC_1_SQRT_2)
}

pub fn density(z: f64) -> f64 {
    (-0.5 * z * z).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// One-tailed p-value of a standardised statistic.
pub fn p_value(z: f64, tail: Tail) -> f64 {
    match tail {
        Tail::Right => upper_tail(z),
        Tail::Left => lower_tail(z),
    }
}

/// The `z` at which the one-tailed p-value equals `alpha`.
pub fn critical_value(alpha: f64, tail: Tail) -> Result<f64> {
    ensure!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
    let mut z = SQRT_2 * erfc_inv(2.0 * alpha);
    // polish against the forward tail function
    for _ in 0..3 {
        let step = (upper_tail(z) - alpha) / density(z);
        if !step.is_finite() {
            break;
        }
        z += step;
    }
    Ok(match tail {
        Tail::Right => z,
        Tail::Left => -z,
    })
}
