use std::collections::HashMap;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use crate::error::{ensure, Error, Result};
use crate::search::{CaseStudy, ControllerRecord, Provenance, SearchConfig, Source};
use crate::spin::{BiasController, Coupling, Site, SpinRingSpec, TransferMetrics};

pub const FORMAT_VERSION: &str = "landscape-study/1";

/// Shortest decimal that parses back to the same bits.
pub(crate) fn fmt_f64(v: f64) -> String {
    format!("{v:?}")
}

fn join<T: ToString>(values: impl IntoIterator<Item = T>) -> String {
    values.into_iter().map(|v| v.to_string()).collect::<Vec<_>>().join(",")
}

/// `n,error,prob,t_f,logsens,sens_norm,D_1..D_M,dprobdJ_1..dprobdJ_M`.
pub fn column_names(spins: usize) -> Vec<String> {
    let mut cols: Vec<String> = ["n", "error", "prob", "t_f", "logsens", "sens_norm"]
        .iter()
        .map(|s| s.to_string())
        .collect();
    cols.extend((1..=spins).map(|m| format!("D_{m}")));
    cols.extend((1..=spins).map(|m| format!("dprobdJ_{m}")));
    cols
}

fn render(study: &CaseStudy) -> Result<Vec<u8>> {
    let m = study.ring.spins();
    let mut head = Vec::<(String, String)>::new();
    let mut put = |k: &str, v: String| head.push((k.to_string(), v));
    put("format", FORMAT_VERSION.into());
    put("spins", m.to_string());
    put("couplings", join(study.ring.couplings().iter().map(|&j| fmt_f64(j))));
    put("epsilon", fmt_f64(study.ring.coupling().epsilon()));
    put("in", study.input.to_string());
    put("out", study.output.to_string());
    match &study.provenance.source {
        Source::Generated(cfg) => {
            put("source", "generated".into());
            for (k, v) in cfg.canonical() {
                put(&format!("config.{k}"), v);
            }
            put("config_hash", cfg.hash());
        }
        Source::External { path } => {
            put("source", "external".into());
            put("external_path", path.clone());
        }
    }
    put("tasks", study.provenance.tasks.to_string());
    put("failed", study.provenance.failed.to_string());
    put("rejected", study.provenance.rejected.to_string());
    put("records", study.len().to_string());

    let mut out = Vec::new();
    for (k, v) in &head {
        writeln!(out, "# {k}={v}").expect("writing to memory");
    }
    for r in &study.records {
        writeln!(
            out,
            "# record={},{},{},{}",
            r.n,
            r.task_index,
            u8::from(r.converged),
            fmt_f64(r.metrics.phase)
        )
        .expect("writing to memory");
    }

    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(out);
    let to_csv = |e: csv::Error| Error::Numeric(format!("CSV serialisation failed: {e}"));
    w.write_record(column_names(m)).map_err(to_csv)?;
    for r in &study.records {
        ensure!(
            r.controller.bias.len() == m && r.metrics.dprob_dj.len() == m,
            "record {} does not match a ring of {m} spins",
            r.n
        );
        let mut row = vec![
            r.n.to_string(),
            fmt_f64(r.x),
            fmt_f64(r.metrics.prob),
            fmt_f64(r.controller.t_f),
            fmt_f64(r.y),
            fmt_f64(r.metrics.sens_norm()),
        ];
        row.extend(r.controller.bias.iter().map(|&d| fmt_f64(d)));
        row.extend(r.metrics.dprob_dj.iter().map(|&g| fmt_f64(g)));
        w.write_record(&row).map_err(to_csv)?;
    }
    w.into_inner()
        .map_err(|e| Error::Numeric(format!("CSV serialisation failed: {e}")))
}

/// Writes `study` to `path` via a sibling temporary file and a rename.
pub fn save_study(study: &CaseStudy, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    ensure!(!study.is_empty(), "refusing to save a study with no records");
    let bytes = render(study)?;
    let name = path
        .file_name()
        .ok_or_else(|| Error::contract(format!("'{}' is not a file path", path.display())))?;
    let mut tmp_name = std::ffi::OsString::from(".");
    tmp_name.push(name);
    tmp_name.push(format!(".tmp{}", std::process::id()));
    let tmp = path.with_file_name(tmp_name);
    fs::write(&tmp, &bytes).map_err(|e| Error::io(&tmp, e))?;
    fs::rename(&tmp, path).map_err(|e| {
        let _ = fs::remove_file(&tmp);
        Error::io(path, e)
    })
}

struct Parser<'a> {
    path: &'a Path,
}

impl Parser<'_> {
    fn err(&self, line: usize, message: impl Into<String>) -> Error {
        Error::Parse {
            path: self.path.to_path_buf(),
            line,
            message: message.into(),
        }
    }

    fn number<T: std::str::FromStr>(&self, line: usize, what: &str, s: &str) -> Result<T> {
        s.trim()
            .parse()
            .map_err(|_| self.err(line, format!("{what}: cannot parse '{s}'")))
    }

    fn finite(&self, line: usize, what: &str, s: &str) -> Result<f64> {
        let v: f64 = self.number(line, what, s)?;
        if !v.is_finite() {
            return Err(self.err(line, format!("{what} is not finite")));
        }
        Ok(v)
    }
}

struct RecordMeta {
    task_index: usize,
    converged: bool,
    phase: f64,
}

/// [`load_study`] that also returns the normalisation warnings it issued.
pub fn load_study_with_warnings(path: impl AsRef<Path>) -> Result<(CaseStudy, Vec<String>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let p = Parser { path };
    let mut warnings = Vec::new();

    let mut header: HashMap<String, (usize, String)> = HashMap::new();
    let mut config_pairs: Vec<(String, String)> = Vec::new();
    let mut meta: HashMap<usize, (usize, RecordMeta)> = HashMap::new();
    let mut body_start = 0;
    let mut preamble_lines = 0;
    for (i, line) in text.split_inclusive('\n').enumerate() {
        let Some(rest) = line.strip_prefix('#') else {
            break;
        };
        let lineno = i + 1;
        body_start += line.len();
        preamble_lines += 1;
        let (k, v) = rest
            .trim()
            .split_once('=')
            .ok_or_else(|| p.err(lineno, "header line is not key=value"))?;
        if k == "record" {
            let parts: Vec<&str> = v.split(',').collect();
            if parts.len() != 4 {
                return Err(p.err(lineno, "record line needs n,task_index,converged,phase"));
            }
            let n: usize = p.number(lineno, "record n", parts[0])?;
            let m = RecordMeta {
                task_index: p.number(lineno, "task index", parts[1])?,
                converged: match parts[2] {
                    "1" => true,
                    "0" => false,
                    other => return Err(p.err(lineno, format!("converged flag '{other}'"))),
                },
                phase: p.finite(lineno, "phase", parts[3])?,
            };
            if meta.insert(n, (lineno, m)).is_some() {
                return Err(p.err(lineno, format!("duplicate record line for n={n}")));
            }
        } else if let Some(ck) = k.strip_prefix("config.") {
            config_pairs.push((ck.to_string(), v.to_string()));
        } else if header.insert(k.to_string(), (lineno, v.to_string())).is_some() {
            return Err(p.err(lineno, format!("duplicate header key '{k}'")));
        }
    }

    let last_header = preamble_lines.max(1);
    let get = |k: &str| -> Result<(usize, &str)> {
        header
            .get(k)
            .map(|(l, v)| (*l, v.as_str()))
            .ok_or_else(|| p.err(last_header, format!("missing header field '{k}'")))
    };
    let (l, fmt) = get("format")?;
    if fmt != FORMAT_VERSION {
        return Err(p.err(l, format!("unsupported format '{fmt}'")));
    }
    let (l, v) = get("spins")?;
    let spins: usize = p.number(l, "spins", v)?;
    let (l, v) = get("couplings")?;
    let couplings = v
        .split(',')
        .map(|s| p.finite(l, "coupling", s))
        .collect::<Result<Vec<f64>>>()?;
    if couplings.len() != spins {
        return Err(p.err(l, format!("{} couplings for {spins} spins", couplings.len())));
    }
    let (l, v) = get("epsilon")?;
    let coupling = Coupling::from_epsilon(p.finite(l, "epsilon", v)?).map_err(|e| p.err(l, e.to_string()))?;
    let ring = SpinRingSpec::new(couplings, coupling).map_err(|e| p.err(l, e.to_string()))?;
    let site = |k: &str| -> Result<Site> {
        let (l, v) = get(k)?;
        let s = Site::new(p.number(l, k, v)?).map_err(|e| p.err(l, e.to_string()))?;
        if s.label() > spins {
            return Err(p.err(l, format!("{k} site {s} outside a ring of {spins} spins")));
        }
        Ok(s)
    };
    let (input, output) = (site("in")?, site("out")?);
    let count = |k: &str| -> Result<usize> {
        let (l, v) = get(k)?;
        p.number(l, k, v)
    };
    let (l, src) = get("source")?;
    let source = match src {
        "generated" => {
            let cfg = SearchConfig::from_canonical(config_pairs.iter().map(|(k, v)| (k.as_str(), v.as_str())))
                .map_err(|e| p.err(l, e.to_string()))?;
            let (hl, hash) = get("config_hash")?;
            if hash != cfg.hash() {
                return Err(p.err(hl, "config_hash does not match the config fields"));
            }
            Source::Generated(cfg)
        }
        "external" => Source::External {
            path: get("external_path")?.1.to_string(),
        },
        other => return Err(p.err(l, format!("unknown source '{other}'"))),
    };
    let provenance = Provenance {
        source,
        tasks: count("tasks")?,
        failed: count("failed")?,
        rejected: count("rejected")?,
    };
    let declared = count("records")?;

    let window = match &provenance.source {
        Source::Generated(cfg) => cfg.objective.window(),
        Source::External { .. } => None,
    };
    let cutoff = match &provenance.source {
        Source::Generated(cfg) => Some(cfg.error_cutoff),
        Source::External { .. } => None,
    };

    let mut reader = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(&text.as_bytes()[body_start..]);
    let columns = column_names(spins);
    let mut rows = reader.records();
    let line_of = |rec: &csv::StringRecord| {
        preamble_lines + rec.position().map_or(0, |pos| pos.line() as usize)
    };
    let head = match rows.next() {
        Some(r) => r.map_err(|e| p.err(preamble_lines + 1, e.to_string()))?,
        None => return Err(p.err(preamble_lines + 1, "missing column header row")),
    };
    if head.iter().ne(columns.iter().map(String::as_str)) {
        return Err(p.err(
            line_of(&head),
            format!("column header does not match the {spins}-spin schema"),
        ));
    }

    let mut records = Vec::with_capacity(declared);
    for row in rows {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |pos| pos.line() as usize);
            p.err(preamble_lines + line, e.to_string())
        })?;
        let line = line_of(&row);
        if row.len() != columns.len() {
            return Err(p.err(
                line,
                format!("expected {} columns, found {}", columns.len(), row.len()),
            ));
        }
        let f = |i: usize| p.finite(line, &columns[i], &row[i]);
        let n: usize = p.number(line, "n", &row[0])?;
        let x = f(1)?;
        let prob = f(2)?;
        let t_f = f(3)?;
        let y = f(4)?;
        let bias = (6..6 + spins).map(f).collect::<Result<Vec<_>>>()?;
        let dprob_dj = (6 + spins..6 + 2 * spins).map(f).collect::<Result<Vec<_>>>()?;
        if let Some(c) = cutoff {
            if x > c {
                return Err(p.err(line, format!("error {x} exceeds the study cutoff {c}")));
            }
        }
        let (_, rm) = meta
            .remove(&n)
            .ok_or_else(|| p.err(line, format!("no record line for n={n}")))?;
        let controller = BiasController {
            bias,
            t_f,
            window,
        };
        let metrics = TransferMetrics {
            prob,
            err: (1.0 - prob.sqrt()).max(0.0).sqrt(),
            phase: rm.phase,
            dprob_dj,
            logsens: y,
        };
        records.push((
            line,
            ControllerRecord {
                n,
                task_index: rm.task_index,
                controller,
                metrics,
                x,
                y,
                converged: rm.converged,
            },
        ));
    }
    let end_line = preamble_lines + text[body_start..].lines().count();
    if records.len() != declared {
        return Err(p.err(
            end_line,
            format!("header declares {declared} records, found {}", records.len()),
        ));
    }
    if let Some((l, _)) = meta.values().min_by_key(|(l, _)| *l) {
        return Err(p.err(*l, "record line without a matching row"));
    }
    if records.is_empty() {
        return Err(p.err(end_line, "study has no records"));
    }

    let mut records: Vec<ControllerRecord> = records.into_iter().map(|(_, r)| r).collect();
    let numbered = records.iter().enumerate().all(|(i, r)| r.n == i + 1);
    let sorted = records.windows(2).all(|w| w[0].x <= w[1].x);
    if !sorted || !numbered {
        let msg = format!(
            "{}: rows were not in increasing error order with n = 1..N; re-sorted and renumbered",
            path.display()
        );
        log::warn!("{msg}");
        warnings.push(msg);
        records.sort_by(|a, b| a.x.total_cmp(&b.x).then(a.n.cmp(&b.n)));
        for (i, r) in records.iter_mut().enumerate() {
            r.n = i + 1;
        }
    }

    Ok((
        CaseStudy {
            ring,
            input,
            output,
            records,
            provenance,
        },
        warnings,
    ))
}

/// Reads and validates an archive written by [`save_study`].
pub fn load_study(path: impl AsRef<Path>) -> Result<CaseStudy> {
    load_study_with_warnings(path).map(|(s, _)| s)
}

/// Default archive name for a transfer, e.g. `ring5_1to2.csv`.
pub fn archive_name(spins: usize, out: usize) -> PathBuf {
    PathBuf::from(format!("ring{spins}_1to{out}.csv"))
}
