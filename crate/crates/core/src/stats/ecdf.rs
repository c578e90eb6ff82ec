use super::sample::GroupedSample;
use crate::error::{ensure, Result};

/// Two-sample sup distance between empirical CDFs.
pub fn ecdf_distance(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j) = (0, 0);
    let mut sup: f64 = 0.0;
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        sup = sup.max((i as f64 / na - j as f64 / nb).abs());
    }
    sup.max((i as f64 / na - j as f64 / nb).abs())
}

/// Pairwise ECDF sup distances between groups after removing each group's mean.
///
/// Returned as a symmetric `I × I` matrix with a zero diagonal. No threshold is
/// applied; the values are a shape-consistency diagnostic.
pub fn ecdf_consistency(groups: &GroupedSample) -> Result<Vec<Vec<f64>>> {
    ensure!(groups.group_count() >= 2, "ECDF comparison needs at least 2 groups");
    let centred: Vec<Vec<f64>> = groups
        .groups()
        .iter()
        .map(|g| {
            let mean = g.iter().sum::<f64>() / g.len() as f64;
            g.iter().map(|v| v - mean).collect()
        })
        .collect();
    let n = centred.len();
    let mut d = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in i + 1..n {
            let v = ecdf_distance(&centred[i], &centred[j]);
            d[i][j] = v;
            d[j][i] = v;
        }
    }
    Ok(d)
}
