use std::fmt;

use super::GeometryError;
use crate::scalar::Real;

/// Planar heading in radians, always in `(-pi, pi]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default)]
pub struct Angle<T: Real>(T);

impl<T: Real> Angle<T> {
    /// Wraps `raw` into `(-pi, pi]`.
    ///
    /// # Panics
    ///
    /// Panics if `raw` is not finite. Use [`wrap_angle`] for untrusted input.
    pub fn wrap(raw: T) -> Self {
        wrap_angle(raw).expect("angle must be finite")
    }

    pub fn zero() -> Self {
        Angle(T::zero())
    }

    #[inline]
    pub fn radians(self) -> T {
        self.0
    }

    /// Unit vector `(cos, sin)`.
    #[inline]
    pub fn unit(self) -> (T, T) {
        (self.0.cos(), self.0.sin())
    }
}

impl<T: Real> fmt::Display for Angle<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} rad", self.0)
    }
}

/// Maps a finite angle onto `(-pi, pi]`, wrapping at `+pi`.
pub fn wrap_angle<T: Real>(raw: T) -> Result<Angle<T>, GeometryError> {
    if !raw.is_finite() {
        return Err(GeometryError::InvalidArgument(format!(
            "angle must be finite, got {raw}"
        )));
    }
    let tau = T::two_pi();
    let pi = T::PI();
    if raw > -pi && raw <= pi {
        return Ok(Angle(raw));
    }
    // r in [0, tau]; the upper end can be hit through rounding.
    let mut r = raw - tau * (raw / tau).floor();
    if r > pi {
        r = r - tau;
    }
    if r <= -pi {
        r = pi;
    }
    Ok(Angle(r))
}

/// Unsigned shortest rotation between two headings, in `[0, pi]`.
pub fn angle_distance<T: Real>(a: Angle<T>, b: Angle<T>) -> T {
    Angle::wrap(a.0 - b.0).0.abs()
}

/// Direction of the summed unit vectors.
pub fn circular_mean<T: Real>(angles: &[Angle<T>]) -> Result<Angle<T>, GeometryError> {
    if angles.is_empty() {
        return Err(GeometryError::InvalidArgument(
            "circular mean of an empty set".into(),
        ));
    }
    let (c, s) = angles.iter().fold((T::zero(), T::zero()), |(c, s), a| {
        let (ca, sa) = a.unit();
        (c + ca, s + sa)
    });
    let n = T::from_usize(angles.len()).unwrap_or_else(T::one);
    let resultant = (c / n).hypot(s / n);
    if resultant <= T::degenerate_tolerance() {
        return Err(GeometryError::DegenerateMean {
            resultant: resultant.to_f64().unwrap_or(0.0),
        });
    }
    wrap_angle(s.atan2(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_examples() {
        assert_eq!(wrap_angle(0.0).unwrap().radians(), 0.0);
        assert!((wrap_angle(3.0 * PI).unwrap().radians() - PI).abs() < 1e-12);
        assert!((wrap_angle(6.0).unwrap().radians() - (6.0 - 2.0 * PI)).abs() < 1e-12);
        assert!((wrap_angle(6.0f64).unwrap().radians() + 0.2832).abs() < 1e-4);
    }

    #[test]
    fn wrap_boundaries() {
        assert_eq!(wrap_angle(PI).unwrap().radians(), PI);
        assert_eq!(wrap_angle(-PI).unwrap().radians(), PI);
        let tiny = wrap_angle(-1e-300).unwrap().radians();
        assert!(tiny <= 0.0 && tiny > -PI);
        assert!((wrap_angle(-3.0 * PI).unwrap().radians() - PI).abs() < 1e-12);
    }

    #[test]
    fn wrap_rejects_non_finite() {
        assert!(matches!(
            wrap_angle(f64::NAN),
            Err(GeometryError::InvalidArgument(_))
        ));
        assert!(wrap_angle(f64::INFINITY).is_err());
    }

    #[test]
    fn distance_examples() {
        let d = |a: f64, b: f64| angle_distance(Angle::wrap(a), Angle::wrap(b));
        assert!((d(0.1, -0.1) - 0.2).abs() < 1e-12);
        assert!((d(3.0, -3.0) - (2.0 * PI - 6.0)).abs() < 1e-12);
        assert_eq!(d(PI, PI), 0.0);
    }

    #[test]
    fn circular_mean_examples() {
        let m = |v: &[f64]| {
            let a: Vec<_> = v.iter().map(|&x| Angle::wrap(x)).collect();
            circular_mean(&a).map(Angle::radians)
        };
        assert!(m(&[0.1, -0.1]).unwrap().abs() < 1e-15);
        assert!((m(&[PI - 0.1, -PI + 0.1]).unwrap() - PI).abs() < 1e-12);
        assert_eq!(m(&[0.5]).unwrap(), 0.5);
    }

    #[test]
    fn circular_mean_errors() {
        assert!(matches!(
            circular_mean::<f64>(&[]),
            Err(GeometryError::InvalidArgument(_))
        ));
        let opposite = [Angle::wrap(0.3), Angle::wrap(0.3 - PI)];
        assert!(matches!(
            circular_mean(&opposite),
            Err(GeometryError::DegenerateMean { .. })
        ));
    }

    #[test]
    fn works_in_single_precision() {
        let a = wrap_angle(7.0f32).unwrap();
        assert!((a.radians() - (7.0 - std::f32::consts::TAU)).abs() < 1e-6);
        let m = circular_mean(&[Angle::wrap(3.0f32), Angle::wrap(-3.0f32)]).unwrap();
        assert!((m.radians().abs() - std::f32::consts::PI).abs() < 1e-5);
    }
}
