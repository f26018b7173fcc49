//! Sample container and the robust location/scale estimators: median,
//! median absolute deviation (MAD), and the rescaled MAD.
//!
//! The even-length median is the mean of the two central order statistics.
//! Order statistics are found by in-place selection rather than a full sort;
//! the results are identical.

use crate::error::{Error, Result};
use crate::normal;

/// A collection of finite real observations. Construction rejects empty
/// input and non-finite values, so every `Sample` supports estimation.
#[derive(Debug, Clone, PartialEq)]
pub struct Sample {
    values: Vec<f64>,
}

impl Sample {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::domain(
                "sample must contain at least one observation",
            ));
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "non-finite observation {} at index {i}",
                values[i]
            )));
        }
        Ok(Sample { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

impl TryFrom<Vec<f64>> for Sample {
    type Error = Error;

    fn try_from(values: Vec<f64>) -> Result<Self> {
        Sample::new(values)
    }
}

/// Median of a non-empty scratch buffer, by selection. The buffer is
/// reordered.
fn median_in_place(buf: &mut [f64]) -> f64 {
    let n = buf.len();
    debug_assert!(n > 0);
    let mid = n / 2;
    let (below, upper, _) = buf.select_nth_unstable_by(mid, f64::total_cmp);
    let upper = *upper;
    if n % 2 == 1 {
        upper
    } else {
        let lower = below.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        0.5 * (lower + upper)
    }
}

pub(crate) fn median_and_mad(values: &[f64]) -> (f64, f64) {
    let mut buf = values.to_vec();
    let center = median_in_place(&mut buf);
    for (slot, v) in buf.iter_mut().zip(values) {
        *slot = (v - center).abs();
    }
    let spread = median_in_place(&mut buf);
    (center, spread)
}

/// Sample median: the central order statistic for odd length, the mean of
/// the two central order statistics for even length.
pub fn median(sample: &Sample) -> f64 {
    let mut buf = sample.values().to_vec();
    median_in_place(&mut buf)
}

/// Median absolute deviation from the sample median, using the same
/// even-length rule. Zero for a constant sample.
pub fn mad(sample: &Sample) -> f64 {
    median_and_mad(sample.values()).1
}

/// MAD divided by Phi^-1(3/4), consistent for sigma under normality.
pub fn rescaled_mad(sample: &Sample) -> f64 {
    mad(sample) / normal::mad_consistency()
}
