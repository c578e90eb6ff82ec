use super::normal::upper_tail;
use super::result::TrendTestResult;
use crate::error::{ensure, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
    /// Sample standard deviation; 0 for a single value.
    pub std: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Result<Self> {
        ensure!(!values.is_empty(), "cannot summarise an empty set");
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let std = if values.len() > 1 {
            (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Ok(Self {
            min: values.iter().copied().fold(f64::INFINITY, f64::min),
            mean,
            max: values.iter().copied().fold(f64::NEG_INFINITY, f64::max),
            std,
        })
    }
}

/// Min/mean/max/std of `JT = |Z|` and `p` across studies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeanReport {
    pub studies: usize,
    pub jt: Summary,
    pub p: Summary,
    /// Upper-tail p of the mean JT. Diagnostic only: compare with `p.mean`.
    pub p_of_mean_jt: f64,
}

pub fn mean_report(results: &[TrendTestResult]) -> Result<MeanReport> {
    let jt: Vec<f64> = results.iter().map(|r| r.jt).collect();
    let p: Vec<f64> = results.iter().map(|r| r.p).collect();
    let jt = Summary::of(&jt)?;
    Ok(MeanReport {
        studies: results.len(),
        p_of_mean_jt: upper_tail(jt.mean),
        jt,
        p: Summary::of(&p)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_value_has_zero_std() {
        let s = Summary::of(&[3.5]).unwrap();
        assert_eq!((s.min, s.mean, s.max, s.std), (3.5, 3.5, 3.5, 0.0));
    }

    #[test]
    fn one_two_three() {
        let s = Summary::of(&[1.0, 2.0, 3.0]).unwrap();
        assert_eq!(s.mean, 2.0);
        assert_eq!(s.std, 1.0);
    }
}
