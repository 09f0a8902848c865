use super::MetricsError;
use crate::geometry::{Pose2, Pose3, Quaternion, UnitQuaternion, Vec3};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TimedPose<T: Real> {
    pub timestamp: T,
    pub pose: Pose3<T>,
}

/// Time-sorted sequence of spatial poses.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Trajectory<T: Real> {
    pub poses: Vec<TimedPose<T>>,
}

impl<T: Real> Trajectory<T> {
    pub fn new(poses: Vec<TimedPose<T>>) -> Self {
        Trajectory { poses }
    }

    pub fn len(&self) -> usize {
        self.poses.len()
    }

    pub fn is_empty(&self) -> bool {
        self.poses.is_empty()
    }

    /// First timestamp that is not strictly greater than its predecessor.
    pub fn first_unsorted(&self) -> Option<T> {
        self.poses
            .windows(2)
            .find(|w| !(w[0].timestamp < w[1].timestamp))
            .map(|w| w[1].timestamp)
    }

    /// Index of the sample closest in time to `t`, if within `tol`.
    pub fn nearest(&self, t: T, tol: T) -> Option<usize> {
        let i = self.poses.partition_point(|p| p.timestamp < t);
        let candidates = [i.checked_sub(1), Some(i)];
        candidates
            .into_iter()
            .flatten()
            .filter(|&k| k < self.poses.len())
            .map(|k| (k, (self.poses[k].timestamp - t).abs()))
            .filter(|(_, d)| *d <= tol)
            .min_by(|a, b| a.1.partial_cmp(&b.1).expect("finite"))
            .map(|(k, _)| k)
    }
}

/// Parses whitespace-separated rows `t tx ty tz qx qy qz qw` or planar rows
/// `t x y theta`; the layout is fixed by the first data row. Blank lines and
/// lines starting with `#` are skipped.
pub fn parse_trajectory(content: &str) -> Result<Trajectory<f64>, MetricsError> {
    let mut columns: Option<usize> = None;
    let mut poses = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| MetricsError::Parse {
            line: line_no,
            message,
        };
        let fields: Vec<f64> = line
            .split_whitespace()
            .map(|f| {
                f.parse::<f64>()
                    .map_err(|_| err(format!("`{f}` is not a number")))
                    .and_then(|v| {
                        if v.is_finite() {
                            Ok(v)
                        } else {
                            Err(err(format!("`{f}` is not finite")))
                        }
                    })
            })
            .collect::<Result<_, _>>()?;
        let n = *columns.get_or_insert(fields.len());
        if fields.len() != n {
            return Err(err(format!("expected {n} columns, got {}", fields.len())));
        }
        let pose = match n {
            8 => {
                let q = Quaternion::new(fields[7], fields[4], fields[5], fields[6]);
                let rot = UnitQuaternion::new_normalize(q).map_err(|e| err(e.to_string()))?;
                Pose3::new(Vec3::new(fields[1], fields[2], fields[3]), rot)
            }
            4 => Pose3::from_pose2(&Pose2::new(fields[1], fields[2], fields[3])),
            _ => {
                return Err(err(format!(
                    "expected 8 columns (t tx ty tz qx qy qz qw) or 4 (t x y theta), got {n}"
                )))
            }
        };
        poses.push(TimedPose {
            timestamp: fields[0],
            pose,
        });
    }
    Ok(Trajectory::new(poses))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_both_layouts() {
        let t = parse_trajectory(
            "# header\n0.0 1 2 3 0 0 0 1\n0.1 1 2 3 0 0 0.7071067811865476 0.7071067811865476\n",
        )
        .unwrap();
        assert_eq!(t.len(), 2);
        assert_eq!(t.poses[0].pose.translation, Vec3::new(1.0, 2.0, 3.0));
        let yaw = t.poses[1]
            .pose
            .rotation
            .angle_to(&UnitQuaternion::identity());
        assert!((yaw - std::f64::consts::FRAC_PI_2).abs() < 1e-12);

        let planar = parse_trajectory("0 1 2 0.5\n1 2 3 0.6\n").unwrap();
        assert_eq!(planar.poses[1].pose.translation.z, 0.0);
        assert!(
            (planar.poses[0]
                .pose
                .rotation
                .angle_to(&UnitQuaternion::from_yaw(0.5)))
            .abs()
                < 1e-12
        );
    }

    #[test]
    fn rejects_mixed_and_bad_rows() {
        assert!(matches!(
            parse_trajectory("0 1 2 0.5\n1 2 3 0 0 0 0 1\n"),
            Err(MetricsError::Parse { line: 2, .. })
        ));
        assert!(parse_trajectory("0 1 2\n").is_err());
        assert!(parse_trajectory("0 1 2 nan\n").is_err());
        assert!(parse_trajectory("0 1 2 3 0 0 0 0\n").is_err());
    }

    #[test]
    fn nearest_lookup() {
        let t = parse_trajectory("0 0 0 0\n1 0 0 0\n2 0 0 0\n").unwrap();
        assert_eq!(t.nearest(1.01, 0.02), Some(1));
        assert_eq!(t.nearest(1.5, 0.02), None);
        assert_eq!(t.nearest(-0.01, 0.02), Some(0));
        assert_eq!(t.nearest(2.01, 0.02), Some(2));
        assert_eq!(t.first_unsorted(), None);
        let bad = parse_trajectory("0 0 0 0\n2 0 0 0\n1 0 0 0\n").unwrap();
        assert_eq!(bad.first_unsorted(), Some(1.0));
    }
}
