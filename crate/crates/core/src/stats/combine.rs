//! Combining test outcomes from independent experiments.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use super::normal::upper_tail;
use crate::error::{ensure, Result};

/// Smallest p-value fed to Fisher's method; zeros are clamped up to it.
pub const FISHER_P_FLOOR: f64 = 1e-300;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CombineMethod {
    /// `Z = Σ Z_η / √E`.
    Stouffer,
    /// `Z = Σ Z_η / E`, whose null variance is `1/E`.
    Liptak,
    /// `X = -2 Σ log p_η`, chi-squared with `2E` degrees of freedom.
    Fisher,
}

impl std::str::FromStr for CombineMethod {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "stouffer" => Ok(Self::Stouffer),
            "liptak" => Ok(Self::Liptak),
            "fisher" => Ok(Self::Fisher),
            other => Err(format!("unknown combination method '{other}'")),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Combined {
    pub method: CombineMethod,
    pub statistic: f64,
    /// Variance of `statistic` under the null (1 for Stouffer, `1/E` for
    /// Liptak, `4E` for Fisher).
    pub null_variance: f64,
    /// Right-tail p-value of the combined statistic.
    pub p: f64,
    pub inputs: usize,
    /// Set when a zero p-value was clamped for Fisher's method.
    pub clamped: bool,
}

/// Combines z-scores (Stouffer, Liptak) or p-values (Fisher).
///
/// `z` and `p` must describe the same experiments; only the slice a method
/// needs is read.
pub fn combine(z: &[f64], p: &[f64], method: CombineMethod) -> Result<Combined> {
    match method {
        CombineMethod::Stouffer | CombineMethod::Liptak => {
            ensure!(!z.is_empty(), "nothing to combine");
            ensure!(z.iter().all(|v| v.is_finite()), "z-scores must be finite");
            let e = z.len() as f64;
            let sum: f64 = z.iter().sum();
            let (statistic, null_variance) = if method == CombineMethod::Stouffer {
                (sum / e.sqrt(), 1.0)
            } else {
                (sum / e, 1.0 / e)
            };
            Ok(Combined {
                method,
                statistic,
                null_variance,
                p: upper_tail(statistic / null_variance.sqrt()),
                inputs: z.len(),
                clamped: false,
            })
        }
        CombineMethod::Fisher => {
            ensure!(!p.is_empty(), "nothing to combine");
            ensure!(
                p.iter().all(|&v| (0.0..=1.0).contains(&v)),
                "Fisher's method needs p-values in [0, 1]"
            );
            let clamped = p.iter().any(|&v| v < FISHER_P_FLOOR);
            if clamped {
                log::warn!("Fisher combination: p = 0 clamped to {FISHER_P_FLOOR:e}");
            }
            let statistic: f64 = -2.0 * p.iter().map(|&v| v.max(FISHER_P_FLOOR).ln()).sum::<f64>();
            let dof = 2.0 * p.len() as f64;
            let chi2 = ChiSquared::new(dof).map_err(|e| crate::Error::Numeric(e.to_string()))?;
            Ok(Combined {
                method,
                statistic,
                null_variance: 2.0 * dof,
                p: chi2.sf(statistic),
                inputs: p.len(),
                clamped,
            })
        }
    }
}
