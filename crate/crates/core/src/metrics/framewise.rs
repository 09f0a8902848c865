use super::{MetricsError, Trajectory};
use crate::geometry::{align_trajectories, rotation_mean, Pose3, RigidTransform3, Vec3};
use crate::scalar::{mean, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct FrameMetrics<T: Real> {
    pub timestamp: T,
    pub precision_position: T,
    pub precision_rotation: T,
    pub accuracy_position: Option<T>,
    pub accuracy_rotation: Option<T>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FramewiseReport<T: Real> {
    pub runs: usize,
    pub frames: Vec<FrameMetrics<T>>,
    pub precision_position: T,
    pub precision_rotation: T,
    pub accuracy_position: Option<T>,
    pub accuracy_rotation: Option<T>,
    /// Transform applied to each run when alignment is enabled.
    pub alignments: Vec<RigidTransform3<T>>,
}

/// Per-frame precision across `runs` and, with a ground truth, accuracy.
///
/// Frames come from the ground-truth timeline (or the first run without one)
/// and are kept only when every trajectory has a sample within `assoc_tol`.
/// With `align`, each run is rigidly registered onto the ground truth (or
/// onto the first run) over the associated frames before anything is
/// measured.
pub fn framewise_metrics<T: Real>(
    runs: &[Trajectory<T>],
    ground_truth: Option<&Trajectory<T>>,
    assoc_tol: T,
    align: bool,
) -> Result<FramewiseReport<T>, MetricsError> {
    if runs.is_empty() {
        return Err(MetricsError::InvalidArgument(
            "at least one run is required".into(),
        ));
    }
    if !(assoc_tol >= T::zero()) {
        return Err(MetricsError::InvalidArgument(
            "association tolerance must be non-negative".into(),
        ));
    }
    for (i, traj) in runs.iter().chain(ground_truth).enumerate() {
        if let Some(t) = traj.first_unsorted() {
            return Err(MetricsError::Unsorted {
                trajectory: i,
                timestamp: t.to_f64().unwrap_or(f64::NAN),
            });
        }
    }

    let reference = ground_truth.unwrap_or(&runs[0]);
    // (reference index, per-run index)
    let mut matches: Vec<(usize, Vec<usize>)> = Vec::new();
    let mut first_unmatched = None;
    for (ri, rp) in reference.poses.iter().enumerate() {
        let idx: Option<Vec<usize>> = runs
            .iter()
            .map(|run| run.nearest(rp.timestamp, assoc_tol))
            .collect();
        match idx {
            Some(idx) => matches.push((ri, idx)),
            None => {
                first_unmatched.get_or_insert(rp.timestamp);
            }
        }
    }
    if matches.is_empty() {
        let t = first_unmatched
            .or_else(|| runs[0].poses.first().map(|p| p.timestamp))
            .and_then(|t| t.to_f64())
            .unwrap_or(f64::NAN);
        return Err(MetricsError::Association { timestamp: t });
    }

    let run_poses = |r: usize| -> Vec<Pose3<T>> {
        matches
            .iter()
            .map(|(_, idx)| runs[r].poses[idx[r]].pose)
            .collect()
    };
    let mut associated: Vec<Vec<Pose3<T>>> = (0..runs.len()).map(run_poses).collect();
    let truth: Option<Vec<Pose3<T>>> =
        ground_truth.map(|gt| matches.iter().map(|(ri, _)| gt.poses[*ri].pose).collect());

    let mut alignments = Vec::new();
    if align {
        let anchor = truth.clone().unwrap_or_else(|| associated[0].clone());
        for poses in associated.iter_mut() {
            let tf = align_trajectories(poses, &anchor)?;
            poses.iter_mut().for_each(|p| *p = tf.apply_pose(p));
            alignments.push(tf);
        }
    }

    let mut frames = Vec::with_capacity(matches.len());
    for (f, (ri, _)) in matches.iter().enumerate() {
        let at_frame: Vec<Pose3<T>> = associated.iter().map(|poses| poses[f]).collect();
        let positions: Vec<Vec3<T>> = at_frame.iter().map(|p| p.translation).collect();
        let rotations: Vec<_> = at_frame.iter().map(|p| p.rotation).collect();
        let centroid = Vec3::mean(&positions).expect("at least one run");
        let mean_rot = rotation_mean(&rotations)?;
        let precision_position =
            mean(positions.iter().map(|p| (*p - centroid).norm())).expect("non-empty");
        let precision_rotation =
            mean(rotations.iter().map(|q| q.angle_to(&mean_rot))).expect("non-empty");
        let (accuracy_position, accuracy_rotation) = match &truth {
            Some(gt) => {
                let g = gt[f];
                (
                    mean(positions.iter().map(|p| (*p - g.translation).norm())),
                    mean(rotations.iter().map(|q| q.angle_to(&g.rotation))),
                )
            }
            None => (None, None),
        };
        frames.push(FrameMetrics {
            timestamp: reference.poses[*ri].timestamp,
            precision_position,
            precision_rotation,
            accuracy_position,
            accuracy_rotation,
        });
    }

    let agg = |sel: fn(&FrameMetrics<T>) -> T| mean(frames.iter().map(sel)).expect("non-empty");
    let agg_opt = |sel: fn(&FrameMetrics<T>) -> Option<T>| {
        frames
            .iter()
            .map(sel)
            .collect::<Option<Vec<T>>>()
            .and_then(mean)
    };
    Ok(FramewiseReport {
        runs: runs.len(),
        precision_position: agg(|f| f.precision_position),
        precision_rotation: agg(|f| f.precision_rotation),
        accuracy_position: agg_opt(|f| f.accuracy_position),
        accuracy_rotation: agg_opt(|f| f.accuracy_rotation),
        frames,
        alignments,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::UnitQuaternion;
    use crate::metrics::TimedPose;

    fn ground_truth(n: usize) -> Trajectory<f64> {
        Trajectory::new(
            (0..n)
                .map(|i| {
                    let t = i as f64 * 0.1;
                    TimedPose {
                        timestamp: t,
                        pose: Pose3::new(
                            Vec3::new(t.cos(), (2.0 * t).sin(), 0.3 * t),
                            UnitQuaternion::from_euler_zyx(t, 0.1 * t, -0.05 * t),
                        ),
                    }
                })
                .collect(),
        )
    }

    fn offset(traj: &Trajectory<f64>, b: Vec3<f64>, dt: f64) -> Trajectory<f64> {
        Trajectory::new(
            traj.poses
                .iter()
                .map(|p| TimedPose {
                    timestamp: p.timestamp + dt,
                    pose: Pose3::new(p.pose.translation + b, p.pose.rotation),
                })
                .collect(),
        )
    }

    #[test]
    fn identical_runs_equal_to_truth() {
        let gt = ground_truth(20);
        let r = framewise_metrics(
            &[gt.clone(), gt.clone(), gt.clone()],
            Some(&gt),
            0.02,
            false,
        )
        .unwrap();
        assert_eq!(r.frames.len(), 20);
        assert!(r.precision_position < 1e-12 && r.precision_rotation < 1e-7);
        assert!(r.accuracy_position.unwrap() < 1e-12 && r.accuracy_rotation.unwrap() < 1e-7);
    }

    #[test]
    fn constant_bias_runs() {
        let gt = ground_truth(30);
        let b = Vec3::new(0.3, -0.2, 0.1);
        let runs = [offset(&gt, b, 0.004), offset(&gt, b, -0.003)];
        let r = framewise_metrics(&runs, Some(&gt), 0.02, false).unwrap();
        assert!(r.precision_position < 1e-12);
        assert!((r.accuracy_position.unwrap() - b.norm()).abs() < 1e-12);
    }

    #[test]
    fn symmetric_runs() {
        let gt = ground_truth(30);
        let d = Vec3::new(0.05, 0.02, -0.01);
        let runs = [offset(&gt, d, 0.0), offset(&gt, -d, 0.0)];
        let r = framewise_metrics(&runs, Some(&gt), 0.02, false).unwrap();
        assert!((r.precision_position - d.norm()).abs() < 1e-12);
        assert!((r.accuracy_position.unwrap() - d.norm()).abs() < 1e-12);
    }

    #[test]
    fn alignment_removes_rigid_offset() {
        let gt = ground_truth(30);
        let tf = RigidTransform3::new(
            UnitQuaternion::from_euler_zyx(0.4, 0.1, -0.2),
            Vec3::new(1.0, 2.0, 0.5),
        );
        let moved = Trajectory::new(
            gt.poses
                .iter()
                .map(|p| TimedPose {
                    timestamp: p.timestamp,
                    pose: tf.apply_pose(&p.pose),
                })
                .collect(),
        );
        let raw = framewise_metrics(std::slice::from_ref(&moved), Some(&gt), 0.02, false).unwrap();
        assert!(raw.accuracy_position.unwrap() > 0.5);
        let aligned = framewise_metrics(&[moved], Some(&gt), 0.02, true).unwrap();
        assert!(aligned.accuracy_position.unwrap() < 1e-9);
        assert!(aligned.accuracy_rotation.unwrap() < 1e-7);
    }

    #[test]
    fn precision_only_without_truth() {
        let gt = ground_truth(10);
        let r = framewise_metrics(&[gt.clone(), gt], None, 0.02, false).unwrap();
        assert!(r.accuracy_position.is_none());
        assert!(r.frames.iter().all(|f| f.accuracy_rotation.is_none()));
    }

    #[test]
    fn disjoint_timestamps_fail_association() {
        let gt = ground_truth(10);
        let late = offset(&gt, Vec3::zero(), 100.0);
        assert!(matches!(
            framewise_metrics(&[late], Some(&gt), 0.02, false),
            Err(MetricsError::Association { timestamp }) if timestamp == 0.0
        ));
    }

    #[test]
    fn unsorted_input_rejected() {
        let mut gt = ground_truth(5);
        gt.poses.swap(1, 3);
        assert!(matches!(
            framewise_metrics(&[gt], None, 0.02, false),
            Err(MetricsError::Unsorted { .. })
        ));
    }
}
