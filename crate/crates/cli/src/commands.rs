use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicUsize, Ordering};

use landscape_core::search::{generate_case_study, parse_interval, CaseStudy, Objective, SearchConfig, TaskStatus};
use landscape_core::spin::{Coupling, Site, SpinRingSpec};
use landscape_core::stats::{
    combine, jt_test, mean_report, partition_uniform, power_curve, power_threshold,
    sector_meta_analysis, CombineMethod, JtVariant, Permutation, SectorRule, StudyJt, Tail,
    TrendTestResult,
};
use landscape_core::store::{import_external_with_warnings, load_study_with_warnings, save_study, ColumnMapping};

use crate::args::{Command, GenerateArgs, ImportArgs, MetaArgs, PowerArgs, TestArgs};
use crate::manifest::{sibling, RunManifest};
use crate::report::{analyse, render_csv, render_plot, render_text, sample_of, StudyReport, TestSettings};
use crate::CliError;

fn parse<T: std::str::FromStr>(what: &str, s: &str) -> Result<T, CliError>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(|e| CliError::usage(format!("--{what}: {e}")))
}

fn coupling(s: &str) -> Result<Coupling, CliError> {
    match s {
        "xx" => Ok(Coupling::Xx),
        "heisenberg" => Ok(Coupling::Heisenberg),
        other => Err(CliError::usage(format!(
            "--coupling: unknown coupling '{other}' (expected xx|heisenberg)"
        ))),
    }
}

fn interval(what: &str, s: &str) -> Result<(f64, f64), CliError> {
    parse_interval(s).ok_or_else(|| CliError::usage(format!("--{what}: expected lo:hi, got '{s}'")))
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    fs::write(path, bytes).map_err(|e| CliError::data(format!("{}: {e}", path.display())))
}

fn csv_err(e: csv::Error) -> CliError {
    CliError::data(format!("CSV output failed: {e}"))
}

pub fn run(command: &Command) -> Result<(), CliError> {
    match command {
        Command::Generate(a) => cmd_generate(a).map(|_| ()),
        Command::Test(a) => cmd_test(a).map(|_| ()),
        Command::Power(a) => cmd_power(a),
        Command::Meta(a) => cmd_meta(a),
        Command::Import(a) => cmd_import(a),
        Command::Replay(a) => {
            let m = RunManifest::read(&a.manifest)?;
            log::info!("replaying {} from {}", command_name(&m.run), a.manifest.display());
            run(&m.run)
        }
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Generate(_) => "generate",
        Command::Test(_) => "test",
        Command::Power(_) => "power",
        Command::Meta(_) => "meta",
        Command::Import(_) => "import",
        Command::Replay(_) => "replay",
    }
}

pub fn search_config(a: &GenerateArgs) -> Result<(SpinRingSpec, Site, SearchConfig), CliError> {
    let kind = coupling(&a.coupling)?;
    let ring = match &a.couplings {
        Some(j) => {
            if j.len() != a.spins {
                return Err(CliError::usage(format!(
                    "--couplings has {} values for {} spins",
                    j.len(),
                    a.spins
                )));
            }
            SpinRingSpec::new(j.clone(), kind)?
        }
        None => SpinRingSpec::uniform(a.spins, kind)?,
    };
    if a.out == 0 || a.out > ring.max_target() {
        return Err(CliError::usage(format!(
            "--out {} exceeds ceil(M/2) = {} for M = {}",
            a.out,
            ring.max_target(),
            a.spins
        )));
    }
    let config = SearchConfig {
        n_tasks: a.tasks,
        d_bounds: interval("d-bounds", &a.d_bounds)?,
        t_bounds: a.t_bounds.as_deref().map(|t| interval("t-bounds", t)).transpose()?,
        error_cutoff: a.cutoff,
        seed: a.seed,
        objective: parse::<Objective>("objective", &a.objective)?,
        max_iterations: a.max_iterations,
        gradient_tolerance: a.gradient_tolerance,
    };
    config.validate()?;
    Ok((ring, Site::new(a.out)?, config))
}

/// Generates, archives and writes `<output>.manifest.json`.
pub fn cmd_generate(a: &GenerateArgs) -> Result<CaseStudy, CliError> {
    let (ring, out, config) = search_config(a)?;
    let done = AtomicUsize::new(0);
    let step = (config.n_tasks / 10).max(1);
    let progress = |_task: usize, _status: TaskStatus| {
        let k = done.fetch_add(1, Ordering::Relaxed) + 1;
        if k.is_multiple_of(step) || k == config.n_tasks {
            log::info!("{k}/{} tasks done", config.n_tasks);
        }
    };
    let study = generate_case_study(&ring, out, &config, Some(&progress))?;
    save_study(&study, &a.output)?;
    let manifest_path = sibling(&a.output, ".manifest.json");
    RunManifest::new(
        Command::Generate(a.clone()),
        Some(a.seed),
        vec![],
        vec![a.output.clone()],
    )
    .write(&manifest_path)?;
    println!(
        "{}: N={} of {} tasks (failed {}, rejected {})",
        a.output.display(),
        study.len(),
        study.provenance.tasks,
        study.provenance.failed,
        study.provenance.rejected
    );
    Ok(study)
}

fn settings(a: &TestArgs) -> Result<TestSettings, CliError> {
    if a.bins.is_empty() || a.bins.contains(&0) {
        return Err(CliError::usage("--bins needs positive bin counts"));
    }
    Ok(TestSettings {
        bins: a.bins.clone(),
        tail: parse::<Tail>("tail", &a.tail)?,
        alpha: a.alpha,
        variant: parse::<JtVariant>("variant", &a.variant)?,
        permutation: Permutation {
            shuffles: a.shuffles,
            seed: a.perm_seed,
        },
        diagnostic_bins: a.diagnostic_bins,
    })
}

fn study_name(path: &Path) -> String {
    path.file_name()
        .map(|n| n.to_string_lossy().into_owned())
        .unwrap_or_else(|| path.display().to_string())
}

fn load(path: &Path) -> Result<CaseStudy, CliError> {
    let (study, warnings) = load_study_with_warnings(path)?;
    for w in warnings {
        log::warn!("{w}");
    }
    Ok(study)
}

pub fn cmd_test(a: &TestArgs) -> Result<Vec<StudyReport>, CliError> {
    let s = settings(a)?;
    let studies = a
        .input
        .iter()
        .map(|p| load(p).map(|st| (p, st)))
        .collect::<Result<Vec<_>, _>>()?;
    let reports = studies
        .iter()
        .map(|(p, st)| analyse(&study_name(p), st, &s))
        .collect::<Result<Vec<_>, _>>()?;
    let text = render_text(&reports, &s);
    print!("{text}");
    if let Some(prefix) = &a.report {
        let mut outputs = vec![sibling(prefix, ".txt"), sibling(prefix, ".csv")];
        write(&outputs[0], text.as_bytes())?;
        write(&outputs[1], &render_csv(&reports).map_err(csv_err)?)?;
        for (p, st) in &studies {
            let stem = p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
            let plot = sibling(prefix, &format!(".{stem}.plot.csv"));
            write(&plot, &render_plot(st).map_err(csv_err)?)?;
            outputs.push(plot);
        }
        RunManifest::new(Command::Test(a.clone()), None, a.input.clone(), outputs)
            .write(&sibling(prefix, ".manifest.json"))?;
    }
    Ok(reports)
}

pub fn cmd_power(a: &PowerArgs) -> Result<(), CliError> {
    let mut grid = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let mut crossings = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    grid.write_record(["alpha", "mu", "power"]).map_err(csv_err)?;
    crossings
        .write_record(["alpha", "target", "mu"])
        .map_err(csv_err)?;
    for &alpha in &a.alpha {
        for pt in power_curve(alpha, a.mu_max, a.steps)? {
            grid.write_record([alpha.to_string(), pt.mu_a.to_string(), pt.power.to_string()])
                .map_err(csv_err)?;
        }
        let mu = power_threshold(alpha, a.target)?;
        println!("alpha={alpha}: power {} reached at mu={mu:.4}", a.target);
        crossings
            .write_record([alpha.to_string(), a.target.to_string(), mu.to_string()])
            .map_err(csv_err)?;
    }
    if let Some(out) = &a.output {
        let cross_path = out.with_extension("crossings.csv");
        write(out, &grid.into_inner().map_err(|e| csv_err(e.into_error().into()))?)?;
        write(&cross_path, &crossings.into_inner().map_err(|e| csv_err(e.into_error().into()))?)?;
        RunManifest::new(Command::Power(a.clone()), None, vec![], vec![out.clone(), cross_path])
            .write(&sibling(out, ".manifest.json"))?;
    }
    Ok(())
}

fn expand_inputs(patterns: &[String]) -> Result<Vec<PathBuf>, CliError> {
    let mut paths = Vec::new();
    for pat in patterns {
        let matches: Vec<PathBuf> = glob::glob(pat)
            .map_err(|e| CliError::usage(format!("--inputs '{pat}': {e}")))?
            .collect::<Result<_, _>>()
            .map_err(|e| CliError::data(e.to_string()))?;
        if matches.is_empty() {
            return Err(CliError::data(format!("--inputs '{pat}' matched no files")));
        }
        paths.extend(matches);
    }
    paths.sort();
    paths.dedup();
    Ok(paths)
}

/// Combined result of a meta-analysis.
#[derive(Debug, Clone)]
pub struct MetaOutcome {
    pub studies: Vec<(PathBuf, usize, usize, TrendTestResult)>,
    pub statistic: f64,
    pub p: f64,
    pub text: String,
}

pub fn cmd_meta(a: &MetaArgs) -> Result<(), CliError> {
    meta(a).map(|_| ())
}

pub fn meta(a: &MetaArgs) -> Result<MetaOutcome, CliError> {
    let tail = parse::<Tail>("tail", &a.tail)?;
    let paths = expand_inputs(&a.inputs)?;
    let mut studies = Vec::new();
    for p in &paths {
        let st = load(p)?;
        let groups = partition_uniform(&sample_of(&st)?, a.bins)?;
        let r = jt_test(&groups, tail, a.alpha)?;
        studies.push((p.clone(), st.ring.spins(), st.output.label(), r));
    }
    let results: Vec<TrendTestResult> = studies.iter().map(|s| s.3.clone()).collect();
    let mut text = String::new();
    let (statistic, p) = if studies.len() == 1 {
        let r = &results[0];
        let _ = writeln!(text, "single study: passthrough of its JT(I={}) result", a.bins);
        (r.z, r.p)
    } else if a.method == "sector" {
        let rule = parse::<SectorRule>("rule", &a.rule)?;
        let jts: Vec<StudyJt> = studies
            .iter()
            .map(|(_, m, out, r)| StudyJt { spins: *m, out: *out, jt: r.jt })
            .collect();
        let r = sector_meta_analysis(&jts, rule, a.alpha)?;
        let _ = writeln!(text, "sector Jonckheere-Terpstra over (Y1, Y2, Y3) of per-study |Z|");
        (r.z, r.p)
    } else {
        let method = parse::<CombineMethod>("method", &a.method)?;
        let z: Vec<f64> = results.iter().map(|r| r.z).collect();
        let pv: Vec<f64> = results.iter().map(|r| r.p).collect();
        let c = combine(&z, &pv, method)?;
        let _ = writeln!(
            text,
            "{} combination of {} studies (null variance {})",
            a.method, c.inputs, c.null_variance
        );
        if c.clamped {
            let _ = writeln!(text, "warning: zero p-values clamped for Fisher's method");
        }
        (c.statistic, c.p)
    };
    let decision = landscape_core::stats::Decision::at(p, a.alpha);
    let _ = writeln!(text, "statistic = {statistic:.4}, p = {p:.4}, H0 {decision} at alpha = {}", a.alpha);
    let m = mean_report(&results)?;
    let _ = writeln!(text);
    let _ = writeln!(text, "{:>8} {:>10} {:>10} {:>10} {:>10}", "", "min", "mean", "max", "std");
    for (label, s) in [("JT", m.jt), ("p", m.p)] {
        let _ = writeln!(
            text,
            "{label:>8} {:>10.4} {:>10.4} {:>10.4} {:>10.4}",
            s.min, s.mean, s.max, s.std
        );
    }
    let _ = writeln!(text, "p of mean JT = {:.4} ({} studies, I={})", m.p_of_mean_jt, m.studies, a.bins);
    print!("{text}");

    if let Some(prefix) = &a.output {
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        w.write_record(["study", "spins", "out", "z", "abs_z", "p"]).map_err(csv_err)?;
        for (path, spins, out, r) in &studies {
            w.write_record([
                study_name(path),
                spins.to_string(),
                out.to_string(),
                r.z.to_string(),
                r.jt.to_string(),
                r.p.to_string(),
            ])
            .map_err(csv_err)?;
        }
        let outputs = vec![sibling(prefix, ".txt"), sibling(prefix, ".csv")];
        write(&outputs[0], text.as_bytes())?;
        write(&outputs[1], &w.into_inner().map_err(|e| csv_err(e.into_error().into()))?)?;
        RunManifest::new(Command::Meta(a.clone()), None, paths.clone(), outputs)
            .write(&sibling(prefix, ".manifest.json"))?;
    }
    Ok(MetaOutcome {
        studies,
        statistic,
        p,
        text,
    })
}

pub fn cmd_import(a: &ImportArgs) -> Result<(), CliError> {
    if !a.delimiter.is_ascii() {
        return Err(CliError::usage("--delimiter must be a single ASCII character"));
    }
    let ring = SpinRingSpec::uniform(a.spins, coupling(&a.coupling)?)?;
    let mut mapping = ColumnMapping::new(&a.error_column, &a.logsens_column, ring, Site::new(a.out)?);
    mapping.cutoff = a.cutoff;
    mapping.delimiter = a.delimiter as u8;
    let (study, warnings) = import_external_with_warnings(&a.input, &mapping)?;
    for w in warnings {
        log::warn!("{w}");
    }
    save_study(&study, &a.output)?;
    RunManifest::new(
        Command::Import(a.clone()),
        None,
        vec![a.input.clone()],
        vec![a.output.clone()],
    )
    .write(&sibling(&a.output, ".manifest.json"))?;
    println!("{}: N={} imported from {}", a.output.display(), study.len(), a.input.display());
    Ok(())
}
