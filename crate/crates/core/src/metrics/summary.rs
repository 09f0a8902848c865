use serde::{Deserialize, Serialize};

use super::MetricsError;
use crate::scalar::Real;

/// Mean, extremes and quartiles of a sample (violin-plot statistics).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSummary<T: Real> {
    pub count: usize,
    pub mean: T,
    pub min: T,
    pub q1: T,
    pub median: T,
    pub q3: T,
    pub max: T,
}

/// Quartiles use linear interpolation between order statistics
/// (position `p * (n - 1)`).
pub fn distribution_summary<T: Real>(values: &[T]) -> Result<DistributionSummary<T>, MetricsError> {
    if values.is_empty() {
        return Err(MetricsError::InvalidArgument(
            "summary of an empty sample".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(MetricsError::InvalidArgument(
            "non-finite sample value".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let n = sorted.len();
    let quantile = |p: f64| -> T {
        let pos = p * (n - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        let frac = T::lit(pos - lo as f64);
        sorted[lo] + (sorted[hi] - sorted[lo]) * frac
    };
    let sum = sorted.iter().fold(T::zero(), |a, v| a + *v);
    Ok(DistributionSummary {
        count: n,
        mean: sum / T::from_usize(n).unwrap(),
        min: sorted[0],
        q1: quantile(0.25),
        median: quantile(0.5),
        q3: quantile(0.75),
        max: sorted[n - 1],
    })
}
