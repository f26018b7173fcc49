//! Test statistics: the location-scale-free pivot (median - mu)/MAD, the
//! robust t analogue sqrt(n) * pivot, its asymptotically standard normal
//! scaling, and the classical Student t statistic.

use crate::error::{Error, Result};
use crate::estimators::{Sample, median_and_mad};
use crate::normal::scaling_constant;
use serde::{Deserialize, Serialize};

/// Which statistic to form from a sample.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticKind {
    /// (median - mu) / MAD
    Pivot,
    /// sqrt(n) * pivot
    RobustT,
    /// sqrt(2n/pi) * Phi^-1(3/4) * pivot
    ScaledRobustT,
    /// (mean - mu) / (S / sqrt(n)) with the n-1 divisor in S
    ClassicalT,
}

/// A computed statistic together with what it is and where it came from.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StatisticValue {
    pub raw: f64,
    pub kind: StatisticKind,
    pub n: usize,
    pub mu0: f64,
}

impl StatisticValue {
    pub fn compute(kind: StatisticKind, sample: &Sample, mu0: f64) -> Result<Self> {
        let raw = compute_statistic(kind, sample, mu0)?;
        Ok(StatisticValue {
            raw,
            kind,
            n: sample.len(),
            mu0,
        })
    }
}

pub(crate) fn compute_statistic(kind: StatisticKind, sample: &Sample, mu0: f64) -> Result<f64> {
    match kind {
        StatisticKind::Pivot => pivot_statistic(sample, mu0),
        StatisticKind::RobustT => robust_t(sample, mu0),
        StatisticKind::ScaledRobustT => scaled_robust_t(sample, mu0),
        StatisticKind::ClassicalT => classical_t(sample, mu0),
    }
}

fn check_test_preconditions(sample: &Sample, mu: f64) -> Result<()> {
    if sample.len() < 2 {
        return Err(Error::InsufficientData {
            required: 2,
            actual: sample.len(),
        });
    }
    if !mu.is_finite() {
        return Err(Error::domain(format!(
            "hypothesized location must be finite, got {mu}"
        )));
    }
    Ok(())
}

/// (median - mu) / MAD. Distribution-free of location and scale within a
/// location-scale family, which is what justifies one calibration table per
/// sample size.
pub fn pivot_statistic(sample: &Sample, mu: f64) -> Result<f64> {
    check_test_preconditions(sample, mu)?;
    let (center, spread) = median_and_mad(sample.values());
    if spread == 0.0 {
        return Err(Error::DegenerateSample("MAD is zero"));
    }
    Ok((center - mu) / spread)
}

/// The robust t analogue: (median - mu) / (MAD / sqrt(n)).
pub fn robust_t(sample: &Sample, mu: f64) -> Result<f64> {
    Ok((sample.len() as f64).sqrt() * pivot_statistic(sample, mu)?)
}

/// sqrt(2n/pi) * Phi^-1(3/4) * pivot: the scaling under which the statistic
/// converges to the standard normal distribution.
pub fn scaled_robust_t(sample: &Sample, mu: f64) -> Result<f64> {
    Ok(scaling_constant(sample.len())? * pivot_statistic(sample, mu)?)
}

/// The conventional Student t statistic, with the n-1 divisor in S.
pub fn classical_t(sample: &Sample, mu: f64) -> Result<f64> {
    check_test_preconditions(sample, mu)?;
    let n = sample.len() as f64;
    let mean = sample.values().iter().sum::<f64>() / n;
    let ss: f64 = sample
        .values()
        .iter()
        .map(|v| (v - mean) * (v - mean))
        .sum();
    let sd = (ss / (n - 1.0)).sqrt();
    if sd == 0.0 {
        return Err(Error::DegenerateSample("sample standard deviation is zero"));
    }
    Ok((mean - mu) / (sd / n.sqrt()))
}


#[cfg(test)]
mod proptests {
    use super::*;
    use proptest::prelude::*;

    fn values_strategy() -> impl Strategy<Value = Vec<f64>> {
        // Two distinct guaranteed entries keep the MAD away from zero.
        (prop::collection::vec(-50.0f64..50.0, 2..30)).prop_map(|mut v| {
            v.push(-60.0);
            v.push(60.0);
            v
        })
    }

    proptest! {
        #[test]
        fn pivot_is_location_scale_free(
            values in values_strategy(),
            mu in -20.0f64..20.0,
            sigma in 0.05f64..8.0,
        ) {
            let z = Sample::new(values.clone()).unwrap();
            let x = Sample::new(values.iter().map(|v| sigma * v + mu).collect()).unwrap();
            let base = pivot_statistic(&z, 0.0).unwrap();
            let moved = pivot_statistic(&x, mu).unwrap();
            prop_assert!((moved - base).abs() < 1e-10);
        }

        #[test]
        fn scaling_chain_holds(values in values_strategy(), mu0 in -5.0f64..5.0) {
            let s = Sample::new(values).unwrap();
            let pivot = pivot_statistic(&s, mu0).unwrap();
            let robust = robust_t(&s, mu0).unwrap();
            let scaled = scaled_robust_t(&s, mu0).unwrap();
            prop_assert!((robust - (s.len() as f64).sqrt() * pivot).abs() < 1e-12);
            prop_assert!((scaled - scaling_constant(s.len()).unwrap() * pivot).abs() < 1e-12);
        }

        #[test]
        fn classical_t_is_pivotal_too(
            values in values_strategy(),
            mu in -20.0f64..20.0,
            sigma in 0.05f64..8.0,
        ) {
            let z = Sample::new(values.clone()).unwrap();
            let x = Sample::new(values.iter().map(|v| sigma * v + mu).collect()).unwrap();
            let base = classical_t(&z, 0.0).unwrap();
            let moved = classical_t(&x, mu).unwrap();
            prop_assert!((moved - base).abs() < 1e-10);
        }
    }
}
