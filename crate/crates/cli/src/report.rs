//! Per-study test battery and its text/CSV renderings.

use std::fmt::Write;

use landscape_core::search::CaseStudy;
use landscape_core::stats::{
    ecdf_consistency, jt_variant, kendall_tau, partition_uniform, rank_von_neumann, JtVariant,
    Permutation, RankedSample, Tail, TrendTestResult, RVN_RANDOMNESS_THRESHOLD,
};
use landscape_core::Result;

/// Smallest bin population for which binning still smooths anything.
pub const MIN_PER_BIN: usize = 3;

#[derive(Debug, Clone)]
pub struct TestSettings {
    pub bins: Vec<usize>,
    pub tail: Tail,
    pub alpha: f64,
    pub variant: JtVariant,
    pub permutation: Permutation,
    pub diagnostic_bins: usize,
}

#[derive(Debug, Clone)]
pub struct StudyReport {
    pub name: String,
    pub spins: usize,
    pub out: usize,
    pub n: usize,
    pub external: bool,
    pub kendall: TrendTestResult,
    /// `(I, result)` per requested bin count.
    pub jt: Vec<(usize, TrendTestResult)>,
    /// Largest and mean off-diagonal ECDF distance across diagnostic bins.
    pub ecdf: Option<(f64, f64)>,
    /// Detrended rank von Neumann ratio per diagnostic bin; `None` when the
    /// bin is too small or constant.
    pub rvn: Vec<Option<f64>>,
    pub warnings: Vec<String>,
}

pub fn sample_of(study: &CaseStudy) -> Result<RankedSample> {
    RankedSample::new(study.xs(), study.ys())
}

pub fn analyse(name: &str, study: &CaseStudy, s: &TestSettings) -> Result<StudyReport> {
    let sample = sample_of(study)?;
    let n = sample.len();
    let mut warnings = Vec::new();
    let kendall = kendall_tau(&sample, s.tail, s.alpha)?;
    let mut jt = Vec::new();
    for &bins in &s.bins {
        if bins > n {
            warnings.push(format!("I={bins} exceeds N={n}; skipped"));
            continue;
        }
        if n / bins < MIN_PER_BIN {
            warnings.push(format!(
                "I={bins} leaves about {} observation(s) per bin for N={n}; bins this small \
                 defeat the purpose of robustification",
                n / bins
            ));
        }
        let groups = partition_uniform(&sample, bins)?;
        jt.push((bins, jt_variant(&groups, s.variant, s.tail, s.alpha, s.permutation)?));
    }

    let (mut ecdf, mut rvn) = (None, Vec::new());
    if s.diagnostic_bins >= 2 && s.diagnostic_bins <= n {
        let groups = partition_uniform(&sample, s.diagnostic_bins)?;
        let d = ecdf_consistency(&groups)?;
        let off: Vec<f64> = (0..d.len())
            .flat_map(|i| (i + 1..d.len()).map(move |j| (i, j)))
            .map(|(i, j)| d[i][j])
            .collect();
        let max = off.iter().copied().fold(0.0, f64::max);
        ecdf = Some((max, off.iter().sum::<f64>() / off.len() as f64));
        rvn = groups
            .groups()
            .iter()
            .map(|g| rank_von_neumann(g, true).ok())
            .collect();
    } else {
        warnings.push(format!(
            "diagnostics need between 2 and N={n} bins, got {}",
            s.diagnostic_bins
        ));
    }
    for w in &warnings {
        log::warn!("{name}: {w}");
    }
    Ok(StudyReport {
        name: name.to_string(),
        spins: study.ring.spins(),
        out: study.output.label(),
        n,
        external: study.is_external(),
        kendall,
        jt,
        ecdf,
        rvn,
        warnings,
    })
}

pub fn render_text(reports: &[StudyReport], s: &TestSettings) -> String {
    let mut t = String::new();
    let _ = writeln!(
        t,
        "trend tests: tail={}, alpha={}, variant={}",
        s.tail, s.alpha, s.variant
    );
    for r in reports {
        let _ = writeln!(t);
        let _ = writeln!(
            t,
            "study {}: M={}, 1 -> {}, N={}, {}",
            r.name,
            r.spins,
            r.out,
            r.n,
            if r.external { "external" } else { "generated" }
        );
        let _ = writeln!(
            t,
            "Kendall tau = {:.4} (z = {:.4}, p = {:.4}, {})",
            r.kendall.statistic, r.kendall.z, r.kendall.p, r.kendall.decision
        );
        let _ = writeln!(t, "{:>5} {:>8} {:>10} {:>8}  decision", "I", "tau", "|Z|", "p");
        for (bins, jt) in &r.jt {
            let _ = writeln!(
                t,
                "{:>5} {:>8.4} {:>10.4} {:>8.4}  {}",
                bins, r.kendall.statistic, jt.jt, jt.p, jt.decision
            );
        }
        if let Some((max, mean)) = r.ecdf {
            let _ = writeln!(
                t,
                "ECDF distance between mean-centred bins ({} bins): max {max:.4}, mean {mean:.4}",
                s.diagnostic_bins
            );
        }
        if !r.rvn.is_empty() {
            let cells: Vec<String> = r
                .rvn
                .iter()
                .map(|v| v.map_or("n/a".to_string(), |v| format!("{v:.3}")))
                .collect();
            let below = r.rvn.iter().flatten().filter(|&&v| v < RVN_RANDOMNESS_THRESHOLD).count();
            let _ = writeln!(
                t,
                "detrended rank von Neumann per bin: {} ({below} below {RVN_RANDOMNESS_THRESHOLD})",
                cells.join(" ")
            );
        }
        for w in &r.warnings {
            let _ = writeln!(t, "warning: {w}");
        }
    }
    t
}

pub fn render_csv(reports: &[StudyReport]) -> std::result::Result<Vec<u8>, csv::Error> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record([
        "study", "spins", "out", "N", "I", "tau", "abs_z", "p", "decision", "z", "statistic", "mean",
        "variance", "test",
    ])?;
    for r in reports {
        for (bins, jt) in &r.jt {
            w.write_record([
                r.name.clone(),
                r.spins.to_string(),
                r.out.to_string(),
                r.n.to_string(),
                bins.to_string(),
                format!("{:.4}", r.kendall.statistic),
                format!("{:.4}", jt.jt),
                format!("{:.4}", jt.p),
                jt.decision.to_string(),
                jt.z.to_string(),
                jt.statistic.to_string(),
                jt.mean.to_string(),
                jt.variance.to_string(),
                jt.test.clone(),
            ])?;
        }
    }
    w.into_inner().map_err(|e| e.into_error().into())
}

/// `n, log10 error, log10 ‖dprob/dJ‖, logsens`; non-finite cells are left empty.
pub fn render_plot(study: &CaseStudy) -> std::result::Result<Vec<u8>, csv::Error> {
    let cell = |v: f64| if v.is_finite() { v.to_string() } else { String::new() };
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    w.write_record(["n", "log10_error", "log10_sens", "logsens"])?;
    for r in &study.records {
        w.write_record([
            r.n.to_string(),
            cell(r.x.log10()),
            cell(r.metrics.sens_norm().log10()),
            cell(r.y),
        ])?;
    }
    w.into_inner().map_err(|e| e.into_error().into())
}
