//! Nonparametric trend and independence statistics.
//!
//! All tests use the normal approximation for their null distributions. JT
//! ties count ½ but the variance carries no tie correction; with continuous
//! sensitivities ties have measure zero.

pub mod combine;
pub mod ecdf;
pub mod jt;
pub mod kendall;
pub mod normal;
pub mod power;
pub mod report;
pub mod result;
pub mod sample;
pub mod sector;
pub mod von_neumann;

pub use combine::{combine, CombineMethod, Combined};
pub use ecdf::{ecdf_consistency, ecdf_distance};
pub use jt::{jt_moments, jt_statistic, jt_test, jt_variant, JtVariant, Permutation};
pub use kendall::{kendall_tau, pair_counts, tau_variance, PairCounts};
pub use normal::{critical_value, lower_tail, p_value, upper_tail, Tail};
pub use power::{power, power_curve, power_threshold, PowerPoint};
pub use report::{mean_report, MeanReport, Summary};
pub use result::{Decision, Moments, TrendTestResult};
pub use sample::{partition_uniform, GroupedSample, RankedSample};
pub use sector::{sector_meta_analysis, sector_of, Sector, SectorRule, StudyJt};
pub use von_neumann::{detrend, rank_von_neumann, von_neumann, RVN_RANDOMNESS_THRESHOLD};
