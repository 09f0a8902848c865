use std::ops::Mul;

use super::eigen::symmetric_eigen;
use super::GeometryError;
use crate::scalar::Real;

/// Plain quaternion `w + xi + yj + zk`, not necessarily unit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quaternion<T: Real> {
    pub w: T,
    pub x: T,
    pub y: T,
    pub z: T,
}

impl<T: Real> Quaternion<T> {
    pub fn new(w: T, x: T, y: T, z: T) -> Self {
        Quaternion { w, x, y, z }
    }

    pub fn norm(&self) -> T {
        self.dot(self).sqrt()
    }

    pub fn dot(&self, other: &Self) -> T {
        self.w * other.w + self.x * other.x + self.y * other.y + self.z * other.z
    }

    fn to_array(self) -> [T; 4] {
        [self.w, self.x, self.y, self.z]
    }
}

impl<T: Real> Mul for Quaternion<T> {
    type Output = Self;

    fn mul(self, r: Self) -> Self {
        Quaternion {
            w: self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            x: self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            y: self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            z: self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        }
    }
}

/// Rotation as a unit quaternion with `w >= 0`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitQuaternion<T: Real>(Quaternion<T>);

impl<T: Real> UnitQuaternion<T> {
    /// Accepts `q` if its norm is within the unit tolerance, then renormalizes.
    pub fn new(q: Quaternion<T>) -> Result<Self, GeometryError> {
        let n = q.norm();
        if !n.is_finite() || (n - T::one()).abs() > T::unit_tolerance() {
            return Err(GeometryError::InvalidArgument(format!(
                "quaternion norm {n} is not 1"
            )));
        }
        Ok(Self::canonical(q, n))
    }

    /// Normalizes any non-zero finite quaternion.
    pub fn new_normalize(q: Quaternion<T>) -> Result<Self, GeometryError> {
        let n = q.norm();
        if !n.is_finite() || n <= T::degenerate_tolerance() {
            return Err(GeometryError::InvalidArgument(format!(
                "cannot normalize quaternion of norm {n}"
            )));
        }
        Ok(Self::canonical(q, n))
    }

    fn canonical(q: Quaternion<T>, n: T) -> Self {
        let s = if q.w < T::zero() { -n } else { n };
        UnitQuaternion(Quaternion::new(q.w / s, q.x / s, q.y / s, q.z / s))
    }

    pub fn identity() -> Self {
        UnitQuaternion(Quaternion::new(T::one(), T::zero(), T::zero(), T::zero()))
    }

    /// Rotation of `angle` radians about `axis` (need not be normalized).
    pub fn from_axis_angle(axis: [T; 3], angle: T) -> Self {
        let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
        if n == T::zero() {
            return Self::identity();
        }
        let half = angle / T::lit(2.0);
        let s = half.sin() / n;
        Self::canonical(
            Quaternion::new(half.cos(), axis[0] * s, axis[1] * s, axis[2] * s),
            T::one(),
        )
    }

    pub fn from_yaw(yaw: T) -> Self {
        Self::from_axis_angle([T::zero(), T::zero(), T::one()], yaw)
    }

    /// Intrinsic z-y-x (yaw, pitch, roll).
    pub fn from_euler_zyx(yaw: T, pitch: T, roll: T) -> Self {
        let z = Self::from_axis_angle([T::zero(), T::zero(), T::one()], yaw);
        let y = Self::from_axis_angle([T::zero(), T::one(), T::zero()], pitch);
        let x = Self::from_axis_angle([T::one(), T::zero(), T::zero()], roll);
        z * y * x
    }

    #[inline]
    pub fn quaternion(&self) -> Quaternion<T> {
        self.0
    }

    pub fn conjugate(&self) -> Self {
        let q = self.0;
        Self::canonical(Quaternion::new(q.w, -q.x, -q.y, -q.z), T::one())
    }

    pub fn rotate(&self, v: [T; 3]) -> [T; 3] {
        let m = self.to_matrix();
        [
            m[0][0] * v[0] + m[0][1] * v[1] + m[0][2] * v[2],
            m[1][0] * v[0] + m[1][1] * v[1] + m[1][2] * v[2],
            m[2][0] * v[0] + m[2][1] * v[1] + m[2][2] * v[2],
        ]
    }

    /// Row-major rotation matrix.
    pub fn to_matrix(&self) -> [[T; 3]; 3] {
        let Quaternion { w, x, y, z } = self.0;
        let one = T::one();
        let two = T::lit(2.0);
        [
            [
                one - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                one - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                one - two * (x * x + y * y),
            ],
        ]
    }

    /// Geodesic angle to `other`, in `[0, pi]`.
    pub fn angle_to(&self, other: &Self) -> T {
        // 2*atan2(|v|, |w|) of the relative rotation; equal to 2*acos(|<a, b>|)
        // but well conditioned near zero.
        let rel = self.conjugate().0 * other.0;
        let v = (rel.x * rel.x + rel.y * rel.y + rel.z * rel.z).sqrt();
        T::lit(2.0) * v.atan2(rel.w.abs())
    }
}

impl<T: Real> Mul for UnitQuaternion<T> {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        let q = self.0 * rhs.0;
        // Renormalize to stop rounding drift from accumulating in chains.
        let n = q.norm();
        Self::canonical(q, n)
    }
}

/// Geodesic distance `2 acos(|<qa, qb>|)` between two unit quaternions.
pub fn rotation_distance<T: Real>(
    qa: &Quaternion<T>,
    qb: &Quaternion<T>,
) -> Result<T, GeometryError> {
    let a = UnitQuaternion::new(*qa)?;
    let b = UnitQuaternion::new(*qb)?;
    Ok(a.angle_to(&b))
}

/// Chordal mean: principal eigenvector of the summed outer products.
pub fn rotation_mean<T: Real>(
    rotations: &[UnitQuaternion<T>],
) -> Result<UnitQuaternion<T>, GeometryError> {
    let first = rotations
        .first()
        .ok_or_else(|| GeometryError::InvalidArgument("rotation mean of an empty set".into()))?;
    let mut acc = [[T::zero(); 4]; 4];
    for r in rotations {
        let mut q = r.0.to_array();
        if r.0.dot(&first.0) < T::zero() {
            q.iter_mut().for_each(|c| *c = -*c);
        }
        for i in 0..4 {
            for j in 0..4 {
                acc[i][j] = acc[i][j] + q[i] * q[j];
            }
        }
    }
    let eig = symmetric_eigen(&acc);
    let v = eig.vectors[0];
    UnitQuaternion::new_normalize(Quaternion::new(v[0], v[1], v[2], v[3]))
}
