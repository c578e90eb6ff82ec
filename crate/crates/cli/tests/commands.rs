use std::fs;
use std::path::Path;

use clap::Parser;
use landscape_cli::args::Cli;
use landscape_cli::commands::{meta, run};
use landscape_cli::{CliError, args::Command};

fn cli(dir: &Path, args: &[&str]) -> Command {
    let argv = std::iter::once("landscape").chain(args.iter().copied()).map(|a| a.replace("{dir}", dir.to_str().unwrap()));
    Cli::try_parse_from(argv).unwrap().command
}

fn exec(dir: &Path, args: &[&str]) -> Result<(), CliError> {
    run(&cli(dir, args))
}

#[test]
fn generate_is_reproducible_and_replayable() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    exec(p, &["generate", "--spins", "4", "--out", "2", "--tasks", "30", "--seed", "7", "--output", "{dir}/a.csv"]).unwrap();
    exec(p, &["generate", "--spins", "4", "--out", "2", "--tasks", "30", "--seed", "7", "--output", "{dir}/b.csv"]).unwrap();
    let a = fs::read(p.join("a.csv")).unwrap();
    assert_eq!(a, fs::read(p.join("b.csv")).unwrap());

    fs::remove_file(p.join("a.csv")).unwrap();
    exec(p, &["replay", "--manifest", "{dir}/a.csv.manifest.json"]).unwrap();
    assert_eq!(a, fs::read(p.join("a.csv")).unwrap());
}

#[test]
fn target_beyond_half_ring_is_a_usage_error() {
    let d = tempfile::tempdir().unwrap();
    let e = exec(d.path(), &["generate", "--spins", "5", "--out", "4", "--output", "{dir}/x.csv"]).unwrap_err();
    assert_eq!(e.code, CliError::USAGE);
    assert!(e.message.contains("ceil"), "{}", e.message);
    assert!(!d.path().join("x.csv").exists());
}

#[test]
fn test_writes_reports() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    exec(p, &["generate", "--spins", "5", "--out", "2", "--tasks", "60", "--seed", "3", "--output", "{dir}/s.csv"]).unwrap();
    exec(p, &["test", "--input", "{dir}/s.csv", "--bins", "3,10,1000", "--report", "{dir}/rep"]).unwrap();
    let text = fs::read_to_string(p.join("rep.txt")).unwrap();
    assert!(text.contains("Kendall tau"));
    assert!(text.contains("skipped"), "I > N should be reported as skipped:\n{text}");
    let csv = fs::read_to_string(p.join("rep.csv")).unwrap();
    assert!(csv.starts_with("study,spins,out,N,I,tau,abs_z,p,decision"));
    assert_eq!(csv.lines().count(), 3);
    assert!(p.join("rep.s.plot.csv").exists());
    assert!(p.join("rep.manifest.json").exists());
}

#[test]
fn power_grid_and_crossing() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    exec(p, &["power", "--alpha", "0.05", "--mu-max", "5", "--steps", "50", "--output", "{dir}/pw.csv"]).unwrap();
    let grid = fs::read_to_string(p.join("pw.csv")).unwrap();
    assert_eq!(grid.lines().count(), 52);
    let crossing = fs::read_to_string(p.join("pw.crossings.csv")).unwrap();
    let mu: f64 = crossing.lines().nth(1).unwrap().split(',').nth(2).unwrap().parse().unwrap();
    assert!((mu - 2.487).abs() < 1e-3);
}

#[test]
fn meta_combines_and_passes_single_study_through() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    for spins in ["4", "5"] {
        let name = format!("{{dir}}/r_{spins}.csv");
        exec(p, &["generate", "--spins", spins, "--out", "2", "--tasks", "40", "--output", &name]).unwrap();
    }
    let Command::Meta(args) = cli(p, &["meta", "--inputs", "{dir}/r_*.csv", "--bins", "3"]) else { unreachable!() };
    let both = meta(&args).unwrap();
    assert_eq!(both.studies.len(), 2);
    assert!((0.0..=1.0).contains(&both.p));

    let Command::Meta(args) = cli(p, &["meta", "--inputs", "{dir}/r_4.csv", "--bins", "3", "--method", "sector"]) else {
        unreachable!()
    };
    let one = meta(&args).unwrap();
    assert_eq!(one.studies.len(), 1);
    assert!(one.text.contains("passthrough"));
}

#[test]
fn import_reports_missing_column() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path();
    fs::write(p.join("t.csv"), "e,s\n0.01,1\n0.02,2\n").unwrap();
    let e = exec(p, &["import", "--input", "{dir}/t.csv", "--error-column", "err", "--logsens-column", "s", "--spins", "5", "--out", "2", "--output", "{dir}/o.csv"])
        .unwrap_err();
    assert_eq!(e.code, CliError::USAGE);
    assert!(e.message.contains("err"));
    exec(p, &["import", "--input", "{dir}/t.csv", "--error-column", "e", "--logsens-column", "s", "--spins", "5", "--out", "2", "--output", "{dir}/o.csv"]).unwrap();
    exec(p, &["test", "--input", "{dir}/o.csv", "--bins", "2"]).unwrap();
}

#[test]
fn missing_archive_is_a_data_error() {
    let d = tempfile::tempdir().unwrap();
    let e = exec(d.path(), &["test", "--input", "{dir}/nope.csv"]).unwrap_err();
    assert_eq!(e.code, CliError::DATA);
}
