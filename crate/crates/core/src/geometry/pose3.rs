use std::ops::{Add, Mul, Neg, Sub};

use super::{GeometryError, Pose2, UnitQuaternion};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Vec3<T: Real> {
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Vec3<T> {
    pub fn new(x: T, y: T, z: T) -> Self {
        Vec3 { x, y, z }
    }

    pub fn zero() -> Self {
        Self::new(T::zero(), T::zero(), T::zero())
    }

    pub fn from_array(a: [T; 3]) -> Self {
        Self::new(a[0], a[1], a[2])
    }

    pub fn to_array(self) -> [T; 3] {
        [self.x, self.y, self.z]
    }

    pub fn dot(&self, o: &Self) -> T {
        self.x * o.x + self.y * o.y + self.z * o.z
    }

    pub fn cross(&self, o: &Self) -> Self {
        Self::new(
            self.y * o.z - self.z * o.y,
            self.z * o.x - self.x * o.z,
            self.x * o.y - self.y * o.x,
        )
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Arithmetic mean; `None` for an empty slice.
    pub fn mean(points: &[Self]) -> Option<Self> {
        if points.is_empty() {
            return None;
        }
        let n = T::from_usize(points.len())?;
        let sum = points.iter().fold(Self::zero(), |acc, p| acc + *p);
        Some(sum * (T::one() / n))
    }
}

impl<T: Real> Add for Vec3<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.x + o.x, self.y + o.y, self.z + o.z)
    }
}

impl<T: Real> Sub for Vec3<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.x - o.x, self.y - o.y, self.z - o.z)
    }
}

impl<T: Real> Neg for Vec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.x, -self.y, -self.z)
    }
}

impl<T: Real> Mul<T> for Vec3<T> {
    type Output = Self;
    fn mul(self, s: T) -> Self {
        Self::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Spatial pose: translation plus unit-quaternion rotation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Pose3<T: Real> {
    pub translation: Vec3<T>,
    pub rotation: UnitQuaternion<T>,
}

impl<T: Real> Pose3<T> {
    pub fn new(translation: Vec3<T>, rotation: UnitQuaternion<T>) -> Self {
        Pose3 {
            translation,
            rotation,
        }
    }

    pub fn identity() -> Self {
        Self::new(Vec3::zero(), UnitQuaternion::identity())
    }

    /// Embeds a planar pose at `z = 0` with a pure yaw rotation.
    pub fn from_pose2(p: &Pose2<T>) -> Self {
        Self::new(
            Vec3::new(p.x, p.y, T::zero()),
            UnitQuaternion::from_yaw(p.heading()),
        )
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.translation + Vec3::from_array(self.rotation.rotate(other.translation.to_array())),
            self.rotation * other.rotation,
        )
    }

    pub fn inverse(&self) -> Self {
        let r = self.rotation.conjugate();
        Self::new(-Vec3::from_array(r.rotate(self.translation.to_array())), r)
    }
}

/// Rigid transform `p -> R p + t`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RigidTransform3<T: Real> {
    pub rotation: UnitQuaternion<T>,
    pub translation: Vec3<T>,
}

impl<T: Real> RigidTransform3<T> {
    pub fn new(rotation: UnitQuaternion<T>, translation: Vec3<T>) -> Self {
        RigidTransform3 {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::new(UnitQuaternion::identity(), Vec3::zero())
    }

    pub fn apply_point(&self, p: Vec3<T>) -> Vec3<T> {
        Vec3::from_array(self.rotation.rotate(p.to_array())) + self.translation
    }

    /// Left-multiplies a pose: the pose is re-expressed in the target frame.
    pub fn apply_pose(&self, p: &Pose3<T>) -> Pose3<T> {
        Pose3::new(self.apply_point(p.translation), self.rotation * p.rotation)
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &Self) -> Self {
        Self::new(
            self.rotation * other.rotation,
            self.apply_point(other.translation),
        )
    }

    pub fn inverse(&self) -> Self {
        let r = self.rotation.conjugate();
        Self::new(r, -Vec3::from_array(r.rotate(self.translation.to_array())))
    }
}

/// Drops z, roll and pitch; yaw is the heading of the body x-axis in the plane.
pub fn project_se3_to_se2<T: Real>(p: &Pose3<T>) -> Result<Pose2<T>, GeometryError> {
    let m = p.rotation.to_matrix();
    let (r11, r21) = (m[0][0], m[1][0]);
    if r11.abs() + r21.abs() <= T::degenerate_tolerance() {
        return Err(GeometryError::DegenerateProjection);
    }
    Pose2::try_new(p.translation.x, p.translation.y, r21.atan2(r11))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn projection_examples() {
        let p = Pose3::new(Vec3::new(1.0, 2.0, 5.0), UnitQuaternion::identity());
        assert_eq!(project_se3_to_se2(&p).unwrap(), Pose2::new(1.0, 2.0, 0.0));

        let p = Pose3::new(Vec3::zero(), UnitQuaternion::from_yaw(FRAC_PI_2));
        let q = project_se3_to_se2(&p).unwrap();
        assert!((q.heading() - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn projection_of_yaw_and_pitch_matches_matrix_oracle() {
        let (yaw, pitch) = (0.3f64, 0.2f64);
        // Rz(yaw) * Ry(pitch), first column written out by hand.
        let r11 = yaw.cos() * pitch.cos();
        let r21 = yaw.sin() * pitch.cos();
        let oracle = r21.atan2(r11);
        let p = Pose3::new(
            Vec3::zero(),
            UnitQuaternion::from_euler_zyx(yaw, pitch, 0.0),
        );
        let got = project_se3_to_se2(&p).unwrap().heading();
        assert!((got - oracle).abs() < 1e-6);
        assert!((got - 0.3).abs() < 1e-12);
    }

    #[test]
    fn projection_degenerate_when_x_axis_vertical() {
        let p = Pose3::new(
            Vec3::zero(),
            UnitQuaternion::from_euler_zyx(0.0, -FRAC_PI_2, 0.0),
        );
        assert_eq!(
            project_se3_to_se2(&p),
            Err(GeometryError::DegenerateProjection)
        );
    }

    #[test]
    fn transform_inverse_round_trip() {
        let t = RigidTransform3::new(
            UnitQuaternion::from_euler_zyx(0.4, -0.7, 1.1),
            Vec3::new(1.0, -2.0, 0.5),
        );
        let p = Vec3::new(0.3, 0.2, -0.9);
        let back = t.inverse().apply_point(t.apply_point(p));
        assert!((back - p).norm() < 1e-12);
        let pose = Pose3::new(p, UnitQuaternion::from_yaw(0.2));
        let id = pose.compose(&pose.inverse());
        assert!(id.translation.norm() < 1e-12);
        assert!(id.rotation.angle_to(&UnitQuaternion::identity()) < 1e-12);
    }
}
