//! User-facing one-sample tests and confidence intervals.
//!
//! Two calibrations are offered for the robust test: the asymptotic normal
//! approximation of the scaled statistic, and exact finite-sample
//! calibration against the simulated distribution of the pivot, which is
//! valid for every location and scale because the pivot is distribution-free
//! within the family.

use crate::error::{Error, Result};
use crate::estimators::{Sample, median_and_mad};
use crate::montecarlo::{
    EmpiricalDistribution, SimulationConfig, empirical_quantile, simulate_statistic,
};
use crate::normal::{cdf_unchecked, scaling_constant};
use crate::sampling::{DataModel, RngSpec};
use crate::statistics::StatisticKind;
use crate::student_t::student_t_cdf;
use chrono::{SecondsFormat, Utc};
use serde::{Deserialize, Serialize};

/// Default probability grid for persisted quantile tables; covers the
/// standard test levels on both sides.
pub const DEFAULT_TABLE_PROBS: [f64; 13] = [
    0.005, 0.01, 0.025, 0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 0.95, 0.975, 0.99, 0.995,
];

/// Tables used for inference that will be reported should carry at least
/// this many replications.
pub const RECOMMENDED_TABLE_REPS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Alternative {
    TwoSided,
    Greater,
    Less,
}

/// Which calibration to use for the robust test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationMode {
    Asymptotic,
    MonteCarlo,
}

/// Calibration actually applied, as recorded in a result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum Calibration {
    /// Normal approximation of the scaled statistic.
    Asymptotic,
    /// Empirical pivot distribution regenerated from a quantile table.
    MonteCarlo { table_id: String },
    /// Student t distribution with n - 1 degrees of freedom (classical test).
    StudentT,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub level: f64,
    pub reject: bool,
}

/// Outcome of a one-sample test.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    /// The t-analogue statistic: sqrt(n) * pivot for the robust test, the
    /// Student t statistic for the classical one.
    pub statistic_raw: f64,
    /// The asymptotically standard normal scaling of the robust statistic;
    /// absent for the classical test.
    pub statistic_scaled: Option<f64>,
    pub p_value: f64,
    pub alternative: Alternative,
    pub calibration: Calibration,
    pub n: usize,
    pub mu0: f64,
    pub reject_at: Option<Decision>,
}

/// Two-sided confidence interval for the location parameter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConfidenceInterval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

/// Calibrated pivot quantiles for one sample size. Valid for every location
/// and scale because the pivot distribution depends on neither.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuantileTable {
    pub n: usize,
    pub probs: Vec<f64>,
    pub quantiles: Vec<f64>,
    pub reps: usize,
    pub rng: RngSpec,
    /// Provenance metadata only; excluded from reproducibility comparisons.
    pub created_at: String,
}

impl QuantileTable {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::domain("table sample size must be at least 2"));
        }
        if self.reps == 0 {
            return Err(Error::domain("table replication count must be positive"));
        }
        if self.probs.is_empty() || self.probs.len() != self.quantiles.len() {
            return Err(Error::domain(format!(
                "table needs matching non-empty probability and quantile arrays, got {} and {}",
                self.probs.len(),
                self.quantiles.len()
            )));
        }
        if !self
            .probs
            .iter()
            .all(|p| p.is_finite() && *p > 0.0 && *p < 1.0)
        {
            return Err(Error::domain("table probabilities must lie in (0, 1)"));
        }
        if self.probs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::domain(
                "table probabilities must be strictly increasing",
            ));
        }
        if !self.quantiles.iter().all(|q| q.is_finite()) {
            return Err(Error::domain("table quantiles must be finite"));
        }
        if self.quantiles.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::domain("table quantiles must be nondecreasing"));
        }
        Ok(())
    }

    /// Pivot quantile at `p`: a stored grid value when `p` matches one,
    /// otherwise linear interpolation between the bracketing grid points.
    pub fn quantile_at(&self, p: f64) -> Result<f64> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::domain(format!(
                "probability must lie in (0, 1), got {p}"
            )));
        }
        const MATCH_EPS: f64 = 1e-9;
        if let Some(i) = self.probs.iter().position(|g| (g - p).abs() <= MATCH_EPS) {
            return Ok(self.quantiles[i]);
        }
        let first = self.probs[0];
        let last = *self.probs.last().expect("validated non-empty");
        if p < first || p > last {
            return Err(Error::TableMismatch(format!(
                "probability {p} outside the table grid [{first}, {last}]"
            )));
        }
        let hi = self.probs.partition_point(|g| *g < p);
        let lo = hi - 1;
        let t = (p - self.probs[lo]) / (self.probs[hi] - self.probs[lo]);
        Ok(self.quantiles[lo] + t * (self.quantiles[hi] - self.quantiles[lo]))
    }

    /// Identifier naming the simulated distribution behind the table.
    pub fn id(&self) -> String {
        format!(
            "pivot-table(n={}, reps={}, seed={}, stream={})",
            self.n, self.reps, self.rng.seed, self.rng.stream
        )
    }

    fn check_matches_sample(&self, sample: &Sample) -> Result<()> {
        self.validate()?;
        if self.n != sample.len() {
            return Err(Error::TableMismatch(format!(
                "table was calibrated for n = {}, sample has n = {}",
                self.n,
                sample.len()
            )));
        }
        Ok(())
    }

    /// Regenerate the pivot distribution the table was built from.
    fn source_distribution(&self) -> Result<EmpiricalDistribution> {
        simulate_statistic(&SimulationConfig {
            n: self.n,
            reps: self.reps,
            rng: self.rng,
            statistic: StatisticKind::Pivot,
            data_model: DataModel::StdNormal,
            mu0: 0.0,
        })
    }
}

/// Simulate the pivot under standard normal data and record its quantiles
/// at each requested probability.
pub fn build_quantile_table(
    n: usize,
    probs: &[f64],
    reps: usize,
    rng: RngSpec,
) -> Result<QuantileTable> {
    if reps < 1_000 {
        return Err(Error::domain(format!(
            "calibration needs at least 1000 replications, got {reps}"
        )));
    }
    if n < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: n,
        });
    }
    if probs.is_empty() {
        return Err(Error::domain("probability grid must be non-empty"));
    }
    if !probs.iter().all(|p| p.is_finite() && *p > 0.0 && *p < 1.0) {
        return Err(Error::domain("probability grid entries must lie in (0, 1)"));
    }
    if probs.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain(
            "probability grid must be strictly increasing",
        ));
    }

    let dist = simulate_statistic(&SimulationConfig {
        n,
        reps,
        rng,
        statistic: StatisticKind::Pivot,
        data_model: DataModel::StdNormal,
        mu0: 0.0,
    })?;
    let quantiles = probs
        .iter()
        .map(|p| empirical_quantile(&dist, *p))
        .collect::<Result<Vec<f64>>>()?;

    Ok(QuantileTable {
        n,
        probs: probs.to_vec(),
        quantiles,
        reps,
        rng,
        created_at: Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true),
    })
}

fn check_level(level: f64) -> Result<f64> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain(format!(
            "test level must lie in (0, 1), got {level}"
        )));
    }
    Ok(level)
}

fn asymptotic_p_value(scaled: f64, alternative: Alternative) -> f64 {
    match alternative {
        Alternative::TwoSided => 2.0 * (1.0 - cdf_unchecked(scaled.abs())),
        Alternative::Greater => 1.0 - cdf_unchecked(scaled),
        Alternative::Less => cdf_unchecked(scaled),
    }
}

/// One-sample robust location test of H0: mu = mu0.
///
/// In Monte Carlo mode the p-value is the finite-sample-valid exceedance
/// probability (1 + #{simulated at least as extreme}) / (reps + 1) against
/// the table's regenerated pivot distribution, and the level decision uses
/// the equal-tailed table quantiles, which makes it exactly dual to
/// [`robust_confidence_interval`].
pub fn robust_one_sample_test(
    sample: &Sample,
    mu0: f64,
    alternative: Alternative,
    mode: CalibrationMode,
    table: Option<&QuantileTable>,
    level: Option<f64>,
) -> Result<TestResult> {
    let pivot = crate::statistics::pivot_statistic(sample, mu0)?;
    let n = sample.len();
    let raw = (n as f64).sqrt() * pivot;
    let scaled = scaling_constant(n)? * pivot;
    let level = level.map(check_level).transpose()?;

    let (p_value, calibration, reject_at) = match mode {
        CalibrationMode::Asymptotic => {
            let p = asymptotic_p_value(scaled, alternative);
            let decision = level.map(|level| Decision {
                level,
                reject: p <= level,
            });
            (p, Calibration::Asymptotic, decision)
        }
        CalibrationMode::MonteCarlo => {
            let table = table.ok_or(Error::MissingTable)?;
            table.check_matches_sample(sample)?;
            let dist = table.source_distribution()?;
            let values = dist.sorted_values();
            let exceed = match alternative {
                Alternative::TwoSided => values.iter().filter(|v| v.abs() >= pivot.abs()).count(),
                Alternative::Greater => values.iter().filter(|v| **v >= pivot).count(),
                Alternative::Less => values.iter().filter(|v| **v <= pivot).count(),
            };
            let p = (1 + exceed) as f64 / (values.len() + 1) as f64;
            let decision = match level {
                None => None,
                Some(level) => {
                    // Significance level: equal-tailed quantile rule, dual
                    // to the confidence interval at 1 - level.
                    let alpha = level;
                    let reject = match alternative {
                        Alternative::TwoSided => {
                            pivot < table.quantile_at(alpha / 2.0)?
                                || pivot > table.quantile_at(1.0 - alpha / 2.0)?
                        }
                        Alternative::Greater => pivot > table.quantile_at(1.0 - alpha)?,
                        Alternative::Less => pivot < table.quantile_at(alpha)?,
                    };
                    Some(Decision { level, reject })
                }
            };
            (
                p,
                Calibration::MonteCarlo {
                    table_id: table.id(),
                },
                decision,
            )
        }
    };

    Ok(TestResult {
        statistic_raw: raw,
        statistic_scaled: Some(scaled),
        p_value,
        alternative,
        calibration,
        n,
        mu0,
        reject_at,
    })
}

/// Confidence interval for the location, inverted from the table's pivot
/// quantiles: [median - q_{1-a/2} * MAD, median - q_{a/2} * MAD].
pub fn robust_confidence_interval(
    sample: &Sample,
    level: f64,
    table: &QuantileTable,
) -> Result<ConfidenceInterval> {
    check_level(level)?;
    table.check_matches_sample(sample)?;
    if sample.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: sample.len(),
        });
    }
    let (center, spread) = median_and_mad(sample.values());
    if spread == 0.0 {
        return Err(Error::DegenerateSample("MAD is zero"));
    }
    let alpha = 1.0 - level;
    let q_lo = table.quantile_at(alpha / 2.0)?;
    let q_hi = table.quantile_at(1.0 - alpha / 2.0)?;
    Ok(ConfidenceInterval {
        lower: center - q_hi * spread,
        upper: center - q_lo * spread,
        level,
    })
}

/// Conventional one-sample Student t test, as the comparison baseline.
pub fn classical_one_sample_test(
    sample: &Sample,
    mu0: f64,
    alternative: Alternative,
    level: Option<f64>,
) -> Result<TestResult> {
    let t = crate::statistics::classical_t(sample, mu0)?;
    let n = sample.len();
    let df = (n - 1) as f64;
    let level = level.map(check_level).transpose()?;
    let p_value = match alternative {
        Alternative::TwoSided => 2.0 * (1.0 - student_t_cdf(t.abs(), df)?),
        Alternative::Greater => 1.0 - student_t_cdf(t, df)?,
        Alternative::Less => student_t_cdf(t, df)?,
    };
    let reject_at = level.map(|level| Decision {
        level,
        reject: p_value <= level,
    });
    Ok(TestResult {
        statistic_raw: t,
        statistic_scaled: None,
        p_value,
        alternative,
        calibration: Calibration::StudentT,
        n,
        mu0,
        reject_at,
    })
}
