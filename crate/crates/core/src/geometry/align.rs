//! Least-squares rigid registration of corresponding positions.
//!
//! Closed-form absolute orientation using the quaternion formulation: the
//! optimal rotation is the principal eigenvector of a 4x4 symmetric matrix
//! built from the cross-covariance, which always yields a proper rotation.

use super::eigen::symmetric_eigen;
use super::{GeometryError, Pose3, Quaternion, RigidTransform3, UnitQuaternion, Vec3};
use crate::scalar::Real;

/// Rigid transform (no scale) minimizing `sum |T * source_i - target_i|^2`
/// over the pose translations.
pub fn align_trajectories<T: Real>(
    source: &[Pose3<T>],
    target: &[Pose3<T>],
) -> Result<RigidTransform3<T>, GeometryError> {
    if source.len() != target.len() {
        return Err(GeometryError::Alignment(format!(
            "length mismatch: {} source poses vs {} target poses",
            source.len(),
            target.len()
        )));
    }
    if source.len() < 3 {
        return Err(GeometryError::Alignment(format!(
            "need at least 3 correspondences, got {}",
            source.len()
        )));
    }
    let src: Vec<Vec3<T>> = source.iter().map(|p| p.translation).collect();
    let dst: Vec<Vec3<T>> = target.iter().map(|p| p.translation).collect();
    let src_mean = Vec3::mean(&src).expect("non-empty");
    let dst_mean = Vec3::mean(&dst).expect("non-empty");

    check_spread(&src, src_mean, "source")?;
    check_spread(&dst, dst_mean, "target")?;

    let mut s = [[T::zero(); 3]; 3];
    for (a, b) in src.iter().zip(&dst) {
        let a = (*a - src_mean).to_array();
        let b = (*b - dst_mean).to_array();
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] = s[i][j] + a[i] * b[j];
            }
        }
    }
    let [[sxx, sxy, sxz], [syx, syy, syz], [szx, szy, szz]] = s;
    let n = [
        [sxx + syy + szz, syz - szy, szx - sxz, sxy - syx],
        [syz - szy, sxx - syy - szz, sxy + syx, szx + sxz],
        [szx - sxz, sxy + syx, -sxx + syy - szz, syz + szy],
        [sxy - syx, szx + sxz, syz + szy, -sxx - syy + szz],
    ];
    let eig = symmetric_eigen(&n);
    let scale = eig.values.iter().fold(T::zero(), |m, v| m.max(v.abs()));
    if eig.values[0] - eig.values[1] <= T::degenerate_tolerance() * scale {
        return Err(GeometryError::Alignment(
            "rotation not unique for this configuration".into(),
        ));
    }
    let v = eig.vectors[0];
    let rotation = UnitQuaternion::new_normalize(Quaternion::new(v[0], v[1], v[2], v[3]))?;
    let translation = dst_mean - Vec3::from_array(rotation.rotate(src_mean.to_array()));
    Ok(RigidTransform3::new(rotation, translation))
}

/// Rejects point sets that are (nearly) a single point or a line.
fn check_spread<T: Real>(
    points: &[Vec3<T>],
    mean: Vec3<T>,
    which: &str,
) -> Result<(), GeometryError> {
    let mut cov = [[T::zero(); 3]; 3];
    for p in points {
        let d = (*p - mean).to_array();
        for i in 0..3 {
            for j in 0..3 {
                cov[i][j] = cov[i][j] + d[i] * d[j];
            }
        }
    }
    let eig = symmetric_eigen(&cov);
    if eig.values[0] <= T::zero() || eig.values[1] <= T::degenerate_tolerance() * eig.values[0] {
        return Err(GeometryError::Alignment(format!(
            "{which} positions are collinear or coincident"
        )));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pts(p: &[[f64; 3]]) -> Vec<Pose3<f64>> {
        p.iter()
            .map(|a| Pose3::new(Vec3::from_array(*a), UnitQuaternion::identity()))
            .collect()
    }

    #[test]
    fn identity_when_equal() {
        let s = pts(&[
            [0.0, 0.0, 0.0],
            [1.0, 0.0, 0.0],
            [0.0, 2.0, 0.0],
            [0.5, 0.5, 1.0],
        ]);
        let t = align_trajectories(&s, &s).unwrap();
        assert!(t.translation.norm() < 1e-12);
        assert!(t.rotation.angle_to(&UnitQuaternion::identity()) < 1e-12);
    }

    #[test]
    fn pure_translation() {
        let s = pts(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        let d: Vec<_> = s
            .iter()
            .map(|p| Pose3::new(p.translation + Vec3::new(1.0, 0.0, 0.0), p.rotation))
            .collect();
        let t = align_trajectories(&s, &d).unwrap();
        assert!((t.translation - Vec3::new(1.0, 0.0, 0.0)).norm() < 1e-12);
        assert!(t.rotation.angle_to(&UnitQuaternion::identity()) < 1e-12);
    }

    #[test]
    fn handles_planar_half_turn() {
        // A proper rotation of pi about z; a naive SVD route can return a reflection here.
        let s = pts(&[[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [-1.0, -1.0, 0.0]]);
        let rot = UnitQuaternion::from_yaw(std::f64::consts::PI);
        let d: Vec<_> = s
            .iter()
            .map(|p| {
                Pose3::new(
                    Vec3::from_array(rot.rotate(p.translation.to_array())),
                    p.rotation,
                )
            })
            .collect();
        let t = align_trajectories(&s, &d).unwrap();
        assert!(t.rotation.angle_to(&rot) < 1e-9);
    }

    #[test]
    fn errors() {
        let s = pts(&[[0.0, 0.0, 0.0], [1.0, 0.0, 0.0], [0.0, 2.0, 0.0]]);
        assert!(matches!(
            align_trajectories(&s, &s[..2]),
            Err(GeometryError::Alignment(_))
        ));
        let line = pts(&[
            [0.0, 0.0, 0.0],
            [1.0, 1.0, 1.0],
            [2.0, 2.0, 2.0],
            [3.0, 3.0, 3.0],
        ]);
        assert!(matches!(
            align_trajectories(&line, &line),
            Err(GeometryError::Alignment(_))
        ));
        assert!(align_trajectories(&s[..2], &s[..2]).is_err());
    }
}
