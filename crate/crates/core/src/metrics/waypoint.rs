use super::MetricsError;
use crate::geometry::{angle_distance, circular_mean, Angle, Pose2};
use crate::scalar::{mean, Real};
use crate::task::{AttainmentTable, RobotProfile};

/// A planar pose tagged with the frame it is expressed in.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FramedPose<'a, T: Real> {
    pub frame: &'a str,
    pub pose: Pose2<T>,
}

impl<'a, T: Real> FramedPose<'a, T> {
    pub fn new(frame: &'a str, pose: Pose2<T>) -> Self {
        FramedPose { frame, pose }
    }

    pub fn all_in(frame: &'a str, poses: &[Pose2<T>]) -> Vec<Self> {
        poses.iter().map(|p| Self::new(frame, *p)).collect()
    }
}

/// Mean position error and mean wrap-aware heading error against a reference.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaypointAccuracy<T: Real> {
    pub position: T,
    pub orientation: T,
}

/// Mean dispersion of positions and headings about their own means.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WaypointPrecision<T: Real> {
    pub position: T,
    pub orientation: T,
}

fn shared_frame<'a, T: Real>(records: &[FramedPose<'a, T>]) -> Result<&'a str, MetricsError> {
    let first = records
        .first()
        .ok_or_else(|| MetricsError::InvalidArgument("no records".into()))?;
    if let Some(other) = records.iter().find(|r| r.frame != first.frame) {
        return Err(MetricsError::FrameMismatch {
            expected: first.frame.to_string(),
            found: other.frame.to_string(),
        });
    }
    Ok(first.frame)
}

pub fn waypoint_accuracy<T: Real>(
    records: &[FramedPose<'_, T>],
    reference: &FramedPose<'_, T>,
) -> Result<WaypointAccuracy<T>, MetricsError> {
    let frame = shared_frame(records)?;
    if frame != reference.frame {
        return Err(MetricsError::FrameMismatch {
            expected: reference.frame.to_string(),
            found: frame.to_string(),
        });
    }
    let target = &reference.pose;
    let position = mean(records.iter().map(|r| r.pose.distance(target))).expect("non-empty");
    let orientation = mean(
        records
            .iter()
            .map(|r| angle_distance(r.pose.theta, target.theta)),
    )
    .expect("non-empty");
    Ok(WaypointAccuracy {
        position,
        orientation,
    })
}

pub fn waypoint_precision<T: Real>(
    records: &[FramedPose<'_, T>],
) -> Result<WaypointPrecision<T>, MetricsError> {
    shared_frame(records)?;
    let cx = mean(records.iter().map(|r| r.pose.x)).expect("non-empty");
    let cy = mean(records.iter().map(|r| r.pose.y)).expect("non-empty");
    let headings: Vec<Angle<T>> = records.iter().map(|r| r.pose.theta).collect();
    let mean_heading = circular_mean(&headings)?;
    let position =
        mean(records.iter().map(|r| (r.pose.x - cx).hypot(r.pose.y - cy))).expect("non-empty");
    let orientation =
        mean(headings.iter().map(|h| angle_distance(*h, mean_heading))).expect("non-empty");
    Ok(WaypointPrecision {
        position,
        orientation,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct WaypointIndicator {
    pub sequence_id: String,
    pub waypoint_id: String,
    /// M_ki
    pub attained: u32,
    /// δ_ki
    pub complete: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CompletenessResult {
    pub ratio: f64,
    pub completed: usize,
    pub total: usize,
    pub indicators: Vec<WaypointIndicator>,
}

/// Fraction of waypoints attained in all `rounds` rounds. A table without
/// waypoints has completeness 0.
pub fn completeness(table: &AttainmentTable, rounds: u32) -> CompletenessResult {
    let indicators: Vec<WaypointIndicator> = table
        .cells()
        .map(|(s, w, cell)| WaypointIndicator {
            sequence_id: s.to_string(),
            waypoint_id: w.to_string(),
            attained: cell.success_count(),
            complete: cell.success_count() >= rounds,
        })
        .collect();
    let total = indicators.len();
    let completed = indicators.iter().filter(|i| i.complete).count();
    let ratio = if total == 0 {
        0.0
    } else {
        completed as f64 / total as f64
    };
    CompletenessResult {
        ratio,
        completed,
        total,
        indicators,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Quantity {
    /// Meters, expressed in robot diameters.
    Position,
    /// Radians, expressed in camera fields of view.
    Orientation,
}

pub fn to_task_units<T: Real>(value: T, quantity: Quantity, profile: &RobotProfile) -> T {
    let scale = match quantity {
        Quantity::Position => profile.diameter_m,
        Quantity::Orientation => profile.fov_rad(),
    };
    value / T::lit(scale)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::AttainmentRecord;
    use std::f64::consts::PI;

    fn framed(poses: &[(f64, f64, f64)]) -> Vec<FramedPose<'static, f64>> {
        poses
            .iter()
            .map(|&(x, y, t)| FramedPose::new("task", Pose2::new(x, y, t)))
            .collect()
    }

    #[test]
    fn accuracy_examples() {
        let r = framed(&[(0.3, 0.4, 0.1), (0.6, 0.8, -0.1)]);
        let reference = FramedPose::new("task", Pose2::identity());
        let a = waypoint_accuracy(&r, &reference).unwrap();
        assert!((a.position - 0.75).abs() < 1e-12);
        assert!((a.orientation - 0.1).abs() < 1e-12);

        let same = framed(&[(1.0, 2.0, 0.3), (1.0, 2.0, 0.3)]);
        let a =
            waypoint_accuracy(&same, &FramedPose::new("task", Pose2::new(1.0, 2.0, 0.3))).unwrap();
        assert_eq!((a.position, a.orientation), (0.0, 0.0));

        let wrap = framed(&[(0.0, 0.0, 3.0), (0.0, 0.0, -3.0)]);
        let a =
            waypoint_accuracy(&wrap, &FramedPose::new("task", Pose2::new(0.0, 0.0, PI))).unwrap();
        assert!((a.orientation - (PI - 3.0)).abs() < 1e-12);
        assert!((a.orientation - 0.1416).abs() < 1e-4);
    }

    #[test]
    fn accuracy_errors() {
        let reference = FramedPose::new("task", Pose2::<f64>::identity());
        assert!(matches!(
            waypoint_accuracy(&[], &reference),
            Err(MetricsError::InvalidArgument(_))
        ));
        let mut r = framed(&[(0.0, 0.0, 0.0), (1.0, 0.0, 0.0)]);
        r[1].frame = "cam7";
        assert!(matches!(
            waypoint_accuracy(&r, &reference),
            Err(MetricsError::FrameMismatch { .. })
        ));
        let cam = framed(&[(0.0, 0.0, 0.0)])
            .into_iter()
            .map(|p| FramedPose::new("cam7", p.pose))
            .collect::<Vec<_>>();
        assert!(matches!(
            waypoint_accuracy(&cam, &reference),
            Err(MetricsError::FrameMismatch { .. })
        ));
    }

    #[test]
    fn precision_examples() {
        let p = waypoint_precision(&framed(&[(0.3, 0.4, 0.1), (0.6, 0.8, -0.1)])).unwrap();
        assert!((p.position - 0.25).abs() < 1e-12);
        assert!((p.orientation - 0.1).abs() < 1e-12);

        let one = waypoint_precision(&framed(&[(4.0, -1.0, 2.0)])).unwrap();
        assert_eq!((one.position, one.orientation), (0.0, 0.0));

        let same = waypoint_precision(&framed(&[(1.0, 1.0, 1.0); 5])).unwrap();
        assert!(same.position.abs() < 1e-15 && same.orientation.abs() < 1e-15);
    }

    #[test]
    fn precision_errors() {
        assert!(matches!(
            waypoint_precision::<f64>(&[]),
            Err(MetricsError::InvalidArgument(_))
        ));
        let antipodal = framed(&[(0.0, 0.0, 0.5), (0.0, 0.0, 0.5 - PI)]);
        assert!(matches!(
            waypoint_precision(&antipodal),
            Err(MetricsError::Geometry(_))
        ));
    }

    #[test]
    fn precision_in_single_precision() {
        let r: Vec<_> = [(0.3f32, 0.4f32, 0.1f32), (0.6, 0.8, -0.1)]
            .iter()
            .map(|&(x, y, t)| FramedPose::new("task", Pose2::new(x, y, t)))
            .collect();
        let p = waypoint_precision(&r).unwrap();
        assert!((p.position - 0.25).abs() < 1e-6);
    }

    fn table_with(counts: &[(&str, &str, u32)], rounds: u32) -> AttainmentTable {
        let mut t = AttainmentTable::new(rounds);
        for &(s, w, n) in counts {
            t.register_waypoint(s, w);
            for j in 1..=rounds {
                let rec = if j <= n {
                    AttainmentRecord::success(s, w, j, "task", 0.0, Pose2::identity())
                } else {
                    AttainmentRecord::failure(s, w, j, "task", 0.0)
                };
                t.insert(rec).unwrap();
            }
        }
        t
    }

    #[test]
    fn completeness_examples() {
        let t = table_with(
            &[
                ("k1", "a", 5),
                ("k1", "b", 5),
                ("k1", "c", 5),
                ("k2", "d", 5),
                ("k2", "e", 4),
            ],
            5,
        );
        let c = completeness(&t, 5);
        assert!((c.ratio - 0.8).abs() < 1e-12);
        assert_eq!((c.completed, c.total), (4, 5));
        let e = c.indicators.iter().find(|i| i.waypoint_id == "e").unwrap();
        assert!(!e.complete);
        assert_eq!(e.attained, 4);

        let all = table_with(&[("k", "a", 3), ("k", "b", 3)], 3);
        assert_eq!(completeness(&all, 3).ratio, 1.0);

        assert_eq!(completeness(&AttainmentTable::new(5), 5).ratio, 0.0);
        let none = table_with(&[("k", "a", 0)], 5);
        assert_eq!(completeness(&none, 5).ratio, 0.0);
    }

    #[test]
    fn task_units() {
        let profile = RobotProfile::new(0.30, 80.0).unwrap();
        assert!((to_task_units(0.30f64, Quantity::Position, &profile) - 1.0).abs() < 1e-15);
        assert_eq!(to_task_units(0.0, Quantity::Position, &profile), 0.0);
        let forty = 40f64.to_radians();
        assert!((to_task_units(forty, Quantity::Orientation, &profile) - 0.5).abs() < 1e-15);
    }
}
