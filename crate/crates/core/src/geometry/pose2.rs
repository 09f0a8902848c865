use super::{wrap_angle, Angle, GeometryError};
use crate::scalar::Real;

/// Planar pose `(x, y, theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose2<T: Real> {
    pub x: T,
    pub y: T,
    pub theta: Angle<T>,
}

impl<T: Real> Pose2<T> {
    /// # Panics
    ///
    /// Panics if `theta` is not finite.
    pub fn new(x: T, y: T, theta: T) -> Self {
        Pose2 {
            x,
            y,
            theta: Angle::wrap(theta),
        }
    }

    pub fn try_new(x: T, y: T, theta: T) -> Result<Self, GeometryError> {
        if !x.is_finite() || !y.is_finite() {
            return Err(GeometryError::InvalidArgument(format!(
                "position must be finite, got ({x}, {y})"
            )));
        }
        Ok(Pose2 {
            x,
            y,
            theta: wrap_angle(theta)?,
        })
    }

    pub fn identity() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    #[inline]
    pub fn heading(&self) -> T {
        self.theta.radians()
    }

    /// Euclidean distance between the positions.
    pub fn distance(&self, other: &Self) -> T {
        (self.x - other.x).hypot(self.y - other.y)
    }

    /// `self * other` in SE(2).
    pub fn compose(&self, other: &Self) -> Self {
        let (c, s) = self.theta.unit();
        Self::new(
            self.x + c * other.x - s * other.y,
            self.y + s * other.x + c * other.y,
            self.heading() + other.heading(),
        )
    }

    pub fn inverse(&self) -> Self {
        let (c, s) = self.theta.unit();
        Self::new(
            -(c * self.x + s * self.y),
            s * self.x - c * self.y,
            -self.heading(),
        )
    }

    /// Motion from `self` to `other`, expressed in `self`'s frame.
    pub fn between(&self, other: &Self) -> Self {
        self.inverse().compose(other)
    }

    pub fn transform_point(&self, px: T, py: T) -> (T, T) {
        let (c, s) = self.theta.unit();
        (self.x + c * px - s * py, self.y + s * px + c * py)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: &Pose2<f64>, b: &Pose2<f64>) -> bool {
        (a.x - b.x).abs() < 1e-12
            && (a.y - b.y).abs() < 1e-12
            && super::super::angle_distance(a.theta, b.theta) < 1e-12
    }

    #[test]
    fn compose_inverse_is_identity() {
        let p = Pose2::new(1.5, -2.0, 2.7);
        assert!(close(&p.compose(&p.inverse()), &Pose2::identity()));
        assert!(close(&p.inverse().compose(&p), &Pose2::identity()));
    }

    #[test]
    fn between_recovers_increment() {
        let a = Pose2::new(0.3, 0.1, 0.4);
        let step = Pose2::new(0.2, -0.05, 0.1);
        let b = a.compose(&step);
        assert!(close(&a.between(&b), &step));
    }

    #[test]
    fn try_new_rejects_nan() {
        assert!(Pose2::try_new(f64::NAN, 0.0, 0.0).is_err());
        assert!(Pose2::try_new(0.0, 0.0, f64::INFINITY).is_err());
    }
}
