use crate::error::{ensure, Result};

/// Paired observations `(x_n, y_n)` ordered by nondecreasing `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedSample {
    x: Vec<f64>,
    y: Vec<f64>,
}

impl RankedSample {
    pub fn new(x: Vec<f64>, y: Vec<f64>) -> Result<Self> {
        ensure!(x.len() == y.len(), "x has {} values, y has {}", x.len(), y.len());
        ensure!(x.len() >= 2, "a ranked sample needs at least 2 observations");
        ensure!(
            x.iter().chain(&y).all(|v| v.is_finite()),
            "observations must be finite"
        );
        ensure!(
            x.windows(2).all(|w| w[0] <= w[1]),
            "x must be sorted in nondecreasing order"
        );
        Ok(Self { x, y })
    }

    /// Builds a sample from unsorted pairs, ordering them by `x` (stable).
    pub fn from_unsorted(mut pairs: Vec<(f64, f64)>) -> Result<Self> {
        pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
        let (x, y) = pairs.into_iter().unzip();
        Self::new(x, y)
    }

    pub fn len(&self) -> usize {
        self.x.len()
    }

    pub fn is_empty(&self) -> bool {
        self.x.is_empty()
    }

    pub fn x(&self) -> &[f64] {
        &self.x
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }
}

/// Dependent-variable observations split into `I` groups ordered along `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct GroupedSample {
    groups: Vec<Vec<f64>>,
    /// Index of the first observation of each group in the originating sample.
    starts: Vec<usize>,
}

impl GroupedSample {
    pub fn new(groups: Vec<Vec<f64>>) -> Result<Self> {
        ensure!(!groups.is_empty(), "at least one group is required");
        ensure!(groups.iter().all(|g| !g.is_empty()), "every group needs at least one observation");
        ensure!(
            groups.iter().flatten().all(|v| v.is_finite()),
            "observations must be finite"
        );
        let starts = groups
            .iter()
            .scan(0, |acc, g| {
                let s = *acc;
                *acc += g.len();
                Some(s)
            })
            .collect();
        Ok(Self { groups, starts })
    }

    pub fn groups(&self) -> &[Vec<f64>] {
        &self.groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.groups.iter().map(Vec::len).collect()
    }

    pub fn starts(&self) -> &[usize] {
        &self.starts
    }

    pub fn group_count(&self) -> usize {
        self.groups.len()
    }

    pub fn total(&self) -> usize {
        self.groups.iter().map(Vec::len).sum()
    }

    /// Group medians `Ỹ_i`.
    pub fn medians(&self) -> Vec<f64> {
        self.groups
            .iter()
            .map(|g| {
                let mut v = g.clone();
                v.sort_by(f64::total_cmp);
                let n = v.len();
                if n % 2 == 1 {
                    v[n / 2]
                } else {
                    0.5 * (v[n / 2 - 1] + v[n / 2])
                }
            })
            .collect()
    }

    /// Same group sizes with new pooled values, in group order.
    pub(crate) fn regroup(&self, pooled: &[f64]) -> Vec<Vec<f64>> {
        let mut out = Vec::with_capacity(self.groups.len());
        let mut offset = 0;
        for g in &self.groups {
            out.push(pooled[offset..offset + g.len()].to_vec());
            offset += g.len();
        }
        out
    }
}

/// Splits the sample into `bins` groups of `⌊N/I⌋` consecutive observations,
/// the last group absorbing the remainder.
pub fn partition_uniform(sample: &RankedSample, bins: usize) -> Result<GroupedSample> {
    let n = sample.len();
    ensure!(bins >= 1, "need at least one bin");
    ensure!(bins <= n, "{bins} bins requested for {n} observations");
    let width = n / bins;
    let groups = (0..bins)
        .map(|i| {
            let start = i * width;
            let end = if i + 1 == bins { n } else { start + width };
            sample.y()[start..end].to_vec()
        })
        .collect();
    GroupedSample::new(groups)
}
