use std::fs::File;
use std::path::Path;

use crate::error::{ensure, Error, Result};
use crate::search::{sort_records, CaseStudy, ControllerRecord, Provenance, Source};
use crate::spin::{BiasController, Site, SpinRingSpec, TransferMetrics};

/// How an external table maps onto a case study.
#[derive(Debug, Clone, PartialEq)]
pub struct ColumnMapping {
    /// Header name of the error `1 - prob` column.
    pub error: String,
    /// Header name of the log-sensitivity column.
    pub logsens: String,
    /// Ring the data belongs to; controllers are zero placeholders of this size.
    pub ring: SpinRingSpec,
    pub out: Site,
    /// Rows with a larger error are dropped (with a warning).
    pub cutoff: Option<f64>,
    pub delimiter: u8,
}

impl ColumnMapping {
    pub fn new(error: impl Into<String>, logsens: impl Into<String>, ring: SpinRingSpec, out: Site) -> Self {
        Self {
            error: error.into(),
            logsens: logsens.into(),
            ring,
            out,
            cutoff: None,
            delimiter: b',',
        }
    }
}

/// Reads a delimited table with a header row into a study flagged external.
/// Returns the study and the warnings issued while normalising it.
pub fn import_external_with_warnings(path: impl AsRef<Path>, mapping: &ColumnMapping) -> Result<(CaseStudy, Vec<String>)> {
    let path = path.as_ref();
    let m = mapping.ring.spins();
    ensure!(
        mapping.out.label() <= m,
        "out site {} outside a ring of {m} spins",
        mapping.out
    );
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .delimiter(mapping.delimiter)
        .comment(Some(b'#'))
        .trim(csv::Trim::All)
        .flexible(true)
        .from_reader(file);
    let parse_err = |line: usize, message: String| Error::Parse {
        path: path.to_path_buf(),
        line,
        message,
    };
    let headers = reader
        .headers()
        .map_err(|e| parse_err(1, e.to_string()))?
        .clone();
    let column = |name: &str| {
        headers.iter().position(|h| h == name).ok_or_else(|| {
            Error::contract(format!(
                "column '{name}' not found in {} (columns: {})",
                path.display(),
                headers.iter().collect::<Vec<_>>().join(", ")
            ))
        })
    };
    let (xi, yi) = (column(&mapping.error)?, column(&mapping.logsens)?);

    let mut warnings = Vec::new();
    let mut records = Vec::new();
    let mut dropped = 0;
    for (row_index, row) in reader.records().enumerate() {
        let row = row.map_err(|e| {
            let line = e.position().map_or(0, |p| p.line() as usize);
            parse_err(line, e.to_string())
        })?;
        let line = row.position().map_or(0, |p| p.line() as usize);
        let value = |i: usize, name: &str| -> Result<f64> {
            let s = row
                .get(i)
                .ok_or_else(|| parse_err(line, format!("row has no '{name}' field")))?;
            let v: f64 = s
                .parse()
                .map_err(|_| parse_err(line, format!("{name}: cannot parse '{s}'")))?;
            if !v.is_finite() {
                return Err(parse_err(line, format!("{name} is not finite")));
            }
            Ok(v)
        };
        let x = value(xi, &mapping.error)?;
        let y = value(yi, &mapping.logsens)?;
        if !(0.0..=1.0).contains(&x) {
            return Err(parse_err(line, format!("error {x} outside [0, 1]")));
        }
        if mapping.cutoff.is_some_and(|c| x > c) {
            dropped += 1;
            continue;
        }
        let prob = 1.0 - x;
        records.push(ControllerRecord {
            n: 0,
            task_index: row_index,
            controller: BiasController::new(vec![0.0; m], 0.0),
            metrics: TransferMetrics {
                prob,
                err: (1.0 - prob.sqrt()).max(0.0).sqrt(),
                phase: 0.0,
                dprob_dj: vec![0.0; m],
                logsens: y,
            },
            x,
            y,
            converged: false,
        });
    }
    if dropped > 0 {
        let msg = format!("{}: dropped {dropped} row(s) above the error cutoff", path.display());
        log::warn!("{msg}");
        warnings.push(msg);
    }
    if records.is_empty() {
        return Err(Error::EmptyStudy {
            tasks: dropped,
            failed: 0,
            rejected: dropped,
        });
    }
    if !records.windows(2).all(|w| w[0].x <= w[1].x) {
        let msg = format!("{}: rows were not in increasing error order; sorted", path.display());
        log::warn!("{msg}");
        warnings.push(msg);
    }
    sort_records(&mut records);
    let tasks = records.len() + dropped;
    Ok((
        CaseStudy {
            ring: mapping.ring.clone(),
            input: Site::new(1)?,
            output: mapping.out,
            records,
            provenance: Provenance {
                source: Source::External {
                    path: path.display().to_string(),
                },
                tasks,
                failed: 0,
                rejected: dropped,
            },
        },
        warnings,
    ))
}

pub fn import_external(path: impl AsRef<Path>, mapping: &ColumnMapping) -> Result<CaseStudy> {
    import_external_with_warnings(path, mapping).map(|(s, _)| s)
}
