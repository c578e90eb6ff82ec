use std::fmt;

use super::normal::{p_value, Tail};
use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Decision {
    RejectNull,
    AcceptNull,
}

impl Decision {
    /// `H0` is rejected only when `p < alpha`; `p == alpha` accepts.
    pub fn at(p: f64, alpha: f64) -> Self {
        if p < alpha {
            Decision::RejectNull
        } else {
            Decision::AcceptNull
        }
    }

    pub fn is_reject(self) -> bool {
        self == Decision::RejectNull
    }
}

impl fmt::Display for Decision {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Decision::RejectNull => "rejected",
            Decision::AcceptNull => "accepted",
        })
    }
}

/// How the null mean and variance of the statistic were obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Moments {
    ClosedForm,
    MonteCarlo { shuffles: usize },
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrendTestResult {
    pub test: String,
    /// Raw statistic: `U` for Jonckheere-Terpstra, `τ` for Kendall.
    pub statistic: f64,
    pub mean: f64,
    pub variance: f64,
    /// Signed standardised statistic.
    pub z: f64,
    /// `|z|`.
    pub jt: f64,
    pub p: f64,
    pub tail: Tail,
    pub alpha: f64,
    pub decision: Decision,
    pub moments: Moments,
}

impl TrendTestResult {
    pub(crate) fn standardise(
        test: impl Into<String>,
        statistic: f64,
        mean: f64,
        variance: f64,
        tail: Tail,
        alpha: f64,
        moments: Moments,
    ) -> Result<Self> {
        ensure!(alpha > 0.0 && alpha < 1.0, "alpha must lie in (0, 1), got {alpha}");
        ensure!(
            variance > 0.0 && variance.is_finite(),
            "null variance of the statistic is {variance}; the test is undefined"
        );
        let z = (statistic - mean) / variance.sqrt();
        let p = p_value(z, tail);
        Ok(Self {
            test: test.into(),
            statistic,
            mean,
            variance,
            z,
            jt: z.abs(),
            p,
            tail,
            alpha,
            decision: Decision::at(p, alpha),
            moments,
        })
    }
}
