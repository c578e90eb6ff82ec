//! On-disk case-study archives.
//!
//! An archive is UTF-8 CSV with LF line endings: a block of `# key=value`
//! header lines, one `# record=n,task_index,converged,phase` line per record,
//! then the column header
//! `n,error,prob,t_f,logsens,sens_norm,D_1..D_M,dprobdJ_1..dprobdJ_M` and one
//! row per record. Floats are written in shortest round-trip form, so a
//! saved study reloads bit-exactly.

mod archive;
mod import;

pub use archive::{
    archive_name, column_names, load_study, load_study_with_warnings, save_study, FORMAT_VERSION,
};
pub use import::{import_external, import_external_with_warnings, ColumnMapping};
