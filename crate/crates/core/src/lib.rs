//! Robust one-sample location testing built on the sample median and the
//! median absolute deviation (MAD).
//!
//! The centerpiece is the pivot (median - mu) / MAD, whose distribution
//! within a location-scale family depends on neither location nor scale.
//! That gives two calibrations for the test and interval machinery here:
//!
//! - an asymptotic one, since sqrt(2n/pi) * Phi^-1(3/4) * pivot converges
//!   to the standard normal distribution under normal data, and
//! - an exact finite-sample one, from Monte Carlo quantile tables of the
//!   pivot that are valid for every (mu, sigma) at a given sample size.
//!
//! The [`montecarlo`] engine behind the tables replicates statistics over
//! per-replication random substreams, so results are identical at any
//! degree of parallelism (rayon when the default `parallel` feature is on,
//! with a sequential path always available). The conventional Student t
//! test is included as the contamination-sensitivity baseline.

pub mod error;
pub mod estimators;
pub mod inference;
pub mod montecarlo;
pub mod normal;
pub mod sampling;
pub mod statistics;
pub mod student_t;

pub use error::{Error, Result};
pub use estimators::{Sample, mad, median, rescaled_mad};
pub use inference::{
    Alternative, Calibration, CalibrationMode, ConfidenceInterval, DEFAULT_TABLE_PROBS, Decision,
    QuantileTable, RECOMMENDED_TABLE_REPS, TestResult, build_quantile_table,
    classical_one_sample_test, robust_confidence_interval, robust_one_sample_test,
};
pub use montecarlo::{
    EmpiricalDistribution, SimulationConfig, empirical_quantile, estimate_rejection_rate,
    ks_distance_to_std_normal, simulate_statistic, simulate_statistic_sequential,
};
pub use normal::{
    NormalConstants, scaling_constant, std_normal_cdf, std_normal_pdf, std_normal_quantile,
};
pub use sampling::{
    ContaminationModel, DataModel, RngSpec, sample_contaminated, sample_location_scale,
    sample_std_normal,
};
pub use statistics::{
    StatisticKind, StatisticValue, classical_t, pivot_statistic, robust_t, scaled_robust_t,
};
pub use student_t::{regularized_incomplete_beta, student_t_cdf, student_t_quantile};
