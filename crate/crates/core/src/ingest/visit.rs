use super::Detection;
use crate::geometry::Pose2;

/// A run of closely spaced detections at one station.
#[derive(Debug, Clone, PartialEq)]
pub struct Visit {
    pub station_id: String,
    pub t_start: f64,
    pub t_end: f64,
    /// Planar pose of the median-timestamp usable detection.
    pub representative_pose: Pose2<f64>,
    /// Station time of the representative detection.
    pub representative_time: f64,
    pub detection_count: usize,
    /// At least one detection saw the whole tag.
    pub fully_visible: bool,
}

impl Visit {
    pub fn midpoint(&self) -> f64 {
        0.5 * (self.t_start + self.t_end)
    }

    pub fn duration(&self) -> f64 {
        self.t_end - self.t_start
    }
}

/// Groups one station's time-sorted detections into visits.
///
/// Detections at most `gap_max` apart belong to the same visit; visits lasting
/// less than `dwell_min` are dropped. The representative pose is taken from
/// the fully visible detections when there are any (lower median for even
/// counts), otherwise from all of them.
pub fn cluster_visits(detections: &[Detection], gap_max: f64, dwell_min: f64) -> Vec<Visit> {
    let mut visits = Vec::new();
    let mut start = 0;
    for i in 1..=detections.len() {
        let split = i == detections.len()
            || detections[i].timestamp - detections[i - 1].timestamp > gap_max;
        if split && start < detections.len() {
            if let Some(v) = make_visit(&detections[start..i]) {
                if v.duration() >= dwell_min {
                    visits.push(v);
                }
            }
            start = i;
        }
    }
    visits
}

fn make_visit(run: &[Detection]) -> Option<Visit> {
    let first = run.first()?;
    let visible: Vec<&Detection> = run
        .iter()
        .filter(|d| d.fully_visible && d.planar().is_some())
        .collect();
    let pool: Vec<&Detection> = if visible.is_empty() {
        run.iter().filter(|d| d.planar().is_some()).collect()
    } else {
        visible.clone()
    };
    let rep = *pool.get((pool.len().max(1) - 1) / 2)?;
    Some(Visit {
        station_id: first.station_id.clone(),
        t_start: first.timestamp,
        t_end: run[run.len() - 1].timestamp,
        representative_pose: rep.planar()?,
        representative_time: rep.timestamp,
        detection_count: run.len(),
        fully_visible: !visible.is_empty(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{Pose3, UnitQuaternion, Vec3};

    fn det(t: f64, visible: bool, x: f64) -> Detection {
        Detection {
            timestamp: t,
            station_id: "cam".into(),
            pose: Pose3::new(Vec3::new(x, 0.0, 0.0), UnitQuaternion::from_yaw(0.1)),
            fully_visible: visible,
        }
    }

    fn at(times: &[f64]) -> Vec<Detection> {
        times.iter().map(|&t| det(t, true, t)).collect()
    }

    #[test]
    fn two_visits() {
        let v = cluster_visits(&at(&[10.0, 10.5, 11.0, 30.0, 30.6, 31.2]), 5.0, 0.8);
        let windows: Vec<(f64, f64)> = v.iter().map(|v| (v.t_start, v.t_end)).collect();
        assert_eq!(windows, vec![(10.0, 11.0), (30.0, 31.2)]);
        assert_eq!(v[0].detection_count, 3);
        assert_eq!(v[0].representative_time, 10.5);
        assert!((v[0].representative_pose.x - 10.5).abs() < 1e-12);
        assert_eq!(v[1].representative_time, 30.6);
    }

    #[test]
    fn single_detection_zero_length() {
        let v = cluster_visits(&at(&[4.0]), 5.0, 0.0);
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].t_start, v[0].t_end), (4.0, 4.0));
        assert_eq!(v[0].detection_count, 1);
    }

    #[test]
    fn gap_boundary() {
        let spaced = at(&[0.0, 6.0, 12.0]);
        assert_eq!(cluster_visits(&spaced, 5.0, 0.0).len(), 3);
        assert!(cluster_visits(&spaced, 5.0, 0.5).is_empty());
        // a gap equal to gap_max still merges
        assert_eq!(cluster_visits(&at(&[0.0, 5.0]), 5.0, 0.0).len(), 1);
        assert!(cluster_visits(&[], 5.0, 0.0).is_empty());
    }

    #[test]
    fn representative_prefers_visible_detections() {
        let dets = vec![
            det(1.0, false, 1.0),
            det(2.0, false, 2.0),
            det(3.0, true, 3.0),
            det(4.0, true, 4.0),
            det(5.0, false, 5.0),
        ];
        let v = cluster_visits(&dets, 5.0, 0.0);
        assert!(v[0].fully_visible);
        assert_eq!(v[0].representative_time, 3.0);

        let hidden: Vec<_> = (0..3).map(|i| det(i as f64, false, 0.0)).collect();
        let v = cluster_visits(&hidden, 5.0, 0.0);
        assert!(!v[0].fully_visible);
        assert_eq!(v[0].representative_time, 1.0);
    }
}
