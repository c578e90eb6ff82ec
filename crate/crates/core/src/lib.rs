//! Controller databases for single-excitation transfer on spin rings, and the
//! rank statistics used to decide whether transfer error and log-sensitivity
//! to coupling uncertainty trend together.
//!
//! The crate is organised in four layers:
//!
//! * [`spin`]: single-excitation Hamiltonians, time evolution, transfer
//!   metrics and their analytic parameter derivatives.
//! * [`search`]: multistart bounded quasi-Newton optimisation of bias
//!   controllers, producing sorted case studies.
//! * [`stats`]: Kendall tau, Jonckheere-Terpstra (with variants), power,
//!   meta-combination and (rank) von Neumann ratios.
//! * [`store`]: the on-disk CSV archive for case studies and import of
//!   externally produced tables.

pub mod error;
pub mod search;
pub mod spin;
pub mod stats;
pub mod store;

pub use error::{Error, Result};
