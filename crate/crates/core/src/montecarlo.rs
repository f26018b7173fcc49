//! Monte Carlo engine: replicate a statistic over independent substreams,
//! collect its empirical distribution, and summarize it (quantiles, distance
//! to the standard normal, rejection rates).
//!
//! Replication `r` owns logical stream `base + r`, so the merged result is a
//! pure function of the configuration: the same values come back in the same
//! order whether the loop runs sequentially or on any number of threads.

use crate::error::{Error, Result};
use crate::normal::cdf_unchecked;
use crate::sampling::{DataModel, RngSpec};
use crate::statistics::{StatisticKind, compute_statistic};
#[cfg(feature = "parallel")]
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Full description of one simulation run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimulationConfig {
    /// Sample size per replication.
    pub n: usize,
    /// Number of replications.
    pub reps: usize,
    /// Base stream; replication `r` uses `rng.substream(r)`.
    pub rng: RngSpec,
    /// Statistic computed on each replication.
    pub statistic: StatisticKind,
    /// Sampler drawn from on each replication.
    pub data_model: DataModel,
    /// Hypothesized location the statistic is formed at.
    pub mu0: f64,
}

impl SimulationConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n < 2 {
            return Err(Error::InsufficientData {
                required: 2,
                actual: self.n,
            });
        }
        if self.reps == 0 {
            return Err(Error::domain("replication count must be at least 1"));
        }
        if !self.mu0.is_finite() {
            return Err(Error::domain(format!(
                "mu0 must be finite, got {}",
                self.mu0
            )));
        }
        match self.data_model {
            DataModel::Contaminated(model) => model.validate()?,
            DataModel::LocationScale { mu, sigma }
                if !(sigma > 0.0 && sigma.is_finite() && mu.is_finite()) =>
            {
                return Err(Error::domain(format!(
                    "location-scale model needs finite mu and positive sigma, got mu={mu}, sigma={sigma}"
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// Sorted replication values of a statistic, plus the configuration that
/// produced them. All values are finite; degenerate replications were
/// resampled and counted.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalDistribution {
    sorted_values: Vec<f64>,
    config: SimulationConfig,
    degenerate_retries: u64,
}

impl EmpiricalDistribution {
    pub fn sorted_values(&self) -> &[f64] {
        &self.sorted_values
    }

    pub fn config(&self) -> &SimulationConfig {
        &self.config
    }

    /// How many replications had to be redrawn because the statistic was
    /// degenerate (zero MAD or zero standard deviation).
    pub fn degenerate_retries(&self) -> u64 {
        self.degenerate_retries
    }

    pub fn len(&self) -> usize {
        self.sorted_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sorted_values.is_empty()
    }
}

/// Retry cap per replication; hitting it means the data model is broken.
const MAX_ATTEMPTS: u64 = 8;
/// More degenerate redraws than this fraction of reps fails the run.
const MAX_DEGENERATE_RATE: f64 = 1e-3;

/// One replication: draw, compute, and on a degenerate sample move to the
/// next block of substreams (offset by whole multiples of `reps`, so retry
/// streams never collide with other replications').
fn replicate_one(config: &SimulationConfig, rep: u64) -> Result<(f64, u64)> {
    let reps = config.reps as u64;
    for attempt in 0..MAX_ATTEMPTS {
        let spec = config
            .rng
            .substream(rep.wrapping_add(attempt.wrapping_mul(reps)));
        let sample = config.data_model.draw(spec, config.n)?;
        match compute_statistic(config.statistic, &sample, config.mu0) {
            Ok(value) => return Ok((value, attempt)),
            Err(Error::DegenerateSample(_)) => continue,
            Err(other) => return Err(other),
        }
    }
    Err(Error::SimulationIntegrity(format!(
        "replication {rep} stayed degenerate after {MAX_ATTEMPTS} attempts"
    )))
}

fn assemble(
    config: &SimulationConfig,
    mut values: Vec<f64>,
    degenerate_retries: u64,
) -> Result<EmpiricalDistribution> {
    let rate = degenerate_retries as f64 / config.reps as f64;
    if rate > MAX_DEGENERATE_RATE {
        return Err(Error::SimulationIntegrity(format!(
            "{degenerate_retries} degenerate replications out of {} (rate {rate:.2e} > {MAX_DEGENERATE_RATE:.0e})",
            config.reps
        )));
    }
    values.sort_unstable_by(f64::total_cmp);
    Ok(EmpiricalDistribution {
        sorted_values: values,
        config: *config,
        degenerate_retries,
    })
}

/// Sequential replication loop. Always available; the reference the
/// parallel path is checked against.
pub fn simulate_statistic_sequential(config: &SimulationConfig) -> Result<EmpiricalDistribution> {
    config.validate()?;
    let mut values = Vec::with_capacity(config.reps);
    let mut retries = 0u64;
    for rep in 0..config.reps as u64 {
        let (value, attempts) = replicate_one(config, rep)?;
        values.push(value);
        retries += attempts;
    }
    assemble(config, values, retries)
}

/// Empirical distribution of the configured statistic. Runs on the rayon
/// pool when the `parallel` feature is enabled (the default); the result is
/// identical either way.
#[cfg(feature = "parallel")]
pub fn simulate_statistic(config: &SimulationConfig) -> Result<EmpiricalDistribution> {
    config.validate()?;
    let outcomes: Vec<(f64, u64)> = (0..config.reps as u64)
        .into_par_iter()
        .map(|rep| replicate_one(config, rep))
        .collect::<Result<_>>()?;
    let retries = outcomes.iter().map(|(_, attempts)| attempts).sum();
    let values = outcomes.into_iter().map(|(value, _)| value).collect();
    assemble(config, values, retries)
}

/// Empirical distribution of the configured statistic (sequential build).
#[cfg(not(feature = "parallel"))]
pub fn simulate_statistic(config: &SimulationConfig) -> Result<EmpiricalDistribution> {
    simulate_statistic_sequential(config)
}

/// Order-statistic quantile with linear interpolation: with
/// h = (reps - 1) * p, interpolates between the floor(h)-th and next sorted
/// values (0-indexed).
pub fn empirical_quantile(dist: &EmpiricalDistribution, p: f64) -> Result<f64> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::domain(format!(
            "quantile probability must lie in (0, 1), got {p}"
        )));
    }
    let values = dist.sorted_values();
    if values.len() < 2 {
        return Err(Error::domain(
            "empirical quantile needs at least 2 replications",
        ));
    }
    let h = (values.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(values.len() - 1);
    let frac = h - lo as f64;
    Ok(values[lo] + frac * (values[hi] - values[lo]))
}

/// Kolmogorov-Smirnov distance between the empirical distribution and the
/// standard normal: sup over sorted values of the gap on either side of the
/// step.
pub fn ks_distance_to_std_normal(dist: &EmpiricalDistribution) -> f64 {
    let reps = dist.len() as f64;
    dist.sorted_values()
        .iter()
        .enumerate()
        .map(|(i, &v)| {
            let f = cdf_unchecked(v);
            let above = ((i + 1) as f64 / reps - f).abs();
            let below = (i as f64 / reps - f).abs();
            above.max(below)
        })
        .fold(0.0, f64::max)
}

/// Fraction of replications beyond `critical`: |statistic| > critical when
/// `two_sided`, statistic > critical otherwise.
pub fn estimate_rejection_rate(
    config: &SimulationConfig,
    critical: f64,
    two_sided: bool,
) -> Result<f64> {
    if critical.is_nan() || critical < 0.0 {
        return Err(Error::domain(format!(
            "critical value must be nonnegative, got {critical}"
        )));
    }
    let dist = simulate_statistic(config)?;
    let rejected = dist
        .sorted_values()
        .iter()
        .filter(|v| {
            if two_sided {
                v.abs() > critical
            } else {
                **v > critical
            }
        })
        .count();
    Ok(rejected as f64 / dist.len() as f64)
}
