use super::MetricsError;
use crate::scalar::Real;

/// Fraction of all waypoints whose precision error lies below each threshold.
///
/// The denominator counts every waypoint, completed or not, so the curve
/// plateaus at the completeness ratio.
#[derive(Debug, Clone, PartialEq)]
pub struct CumulativeCurve<T: Real> {
    pub thresholds: Vec<T>,
    pub fraction_below: Vec<T>,
    /// Normalization range for N-AUC; the last threshold.
    pub x_max: T,
    total: usize,
    sorted_values: Vec<T>,
}

impl<T: Real> CumulativeCurve<T> {
    /// `|{v < t}| / total`, for any `t`.
    pub fn fraction_at(&self, t: T) -> T {
        if self.total == 0 {
            return T::zero();
        }
        let below = self.sorted_values.partition_point(|v| *v < t);
        T::from_usize(below).unwrap() / T::from_usize(self.total).unwrap()
    }

    pub fn total(&self) -> usize {
        self.total
    }

    pub fn points(&self) -> impl Iterator<Item = (T, T)> + '_ {
        self.thresholds
            .iter()
            .copied()
            .zip(self.fraction_below.iter().copied())
    }
}

/// `count` thresholds evenly spaced over `[0, x_max]`, both ends included.
pub fn evenly_spaced<T: Real>(x_max: T, count: usize) -> Vec<T> {
    match count {
        0 => Vec::new(),
        1 => vec![x_max],
        _ => {
            let last = T::from_usize(count - 1).unwrap();
            (0..count)
                .map(|i| x_max * T::from_usize(i).unwrap() / last)
                .collect()
        }
    }
}

pub fn cumulative_curve<T: Real>(
    precision_values: &[T],
    total_waypoints: usize,
    thresholds: &[T],
) -> Result<CumulativeCurve<T>, MetricsError> {
    let x_max = *thresholds
        .last()
        .ok_or_else(|| MetricsError::InvalidArgument("no thresholds".into()))?;
    if thresholds.windows(2).any(|w| !(w[0] < w[1])) || thresholds.iter().any(|t| !t.is_finite()) {
        return Err(MetricsError::InvalidArgument(
            "thresholds must be finite and strictly ascending".into(),
        ));
    }
    if !(x_max > T::zero()) {
        return Err(MetricsError::InvalidArgument(
            "largest threshold must be positive".into(),
        ));
    }
    if precision_values.len() > total_waypoints {
        return Err(MetricsError::InvalidArgument(format!(
            "{} values exceed {} waypoints",
            precision_values.len(),
            total_waypoints
        )));
    }
    if precision_values
        .iter()
        .any(|v| !(v.is_finite() && *v >= T::zero()))
    {
        return Err(MetricsError::InvalidArgument(
            "precision values must be finite and non-negative".into(),
        ));
    }
    let mut sorted_values = precision_values.to_vec();
    sorted_values.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    let mut curve = CumulativeCurve {
        thresholds: thresholds.to_vec(),
        fraction_below: Vec::new(),
        x_max,
        total: total_waypoints,
        sorted_values,
    };
    curve.fraction_below = thresholds.iter().map(|t| curve.fraction_at(*t)).collect();
    Ok(curve)
}

/// Area under the curve over `[0, x_max]` divided by `x_max`.
///
/// The curve is a step function with a jump of `1/total` just after each
/// value, so its area is integrated exactly from the values rather than from
/// the sampled thresholds.
pub fn n_auc<T: Real>(curve: &CumulativeCurve<T>) -> T {
    if curve.total == 0 {
        return T::zero();
    }
    let area = curve
        .sorted_values
        .iter()
        .take_while(|v| **v < curve.x_max)
        .fold(T::zero(), |acc, v| acc + (curve.x_max - *v));
    area / (curve.x_max * T::from_usize(curve.total).unwrap())
}
