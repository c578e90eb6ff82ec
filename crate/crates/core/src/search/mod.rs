//! Multistart bounded quasi-Newton search for bias controllers and assembly
//! of the resulting case studies.

pub mod config;
pub mod optimizer;
pub mod study;

pub use config::{parse_interval, Objective, SearchConfig};
pub use study::{
    generate_case_study, optimize_controller, sample_initial, sort_records, CaseStudy,
    ControllerRecord, Optimized, Progress, Provenance, Source, TaskStatus,
};
