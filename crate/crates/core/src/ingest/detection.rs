use std::collections::BTreeMap;

use super::IngestError;
use crate::geometry::{project_se3_to_se2, Pose2, Pose3, Quaternion, UnitQuaternion, Vec3};

/// One tag pose observed by one station.
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    /// Station clock, seconds.
    pub timestamp: f64,
    pub station_id: String,
    /// Robot tag in the station's local frame.
    pub pose: Pose3<f64>,
    pub fully_visible: bool,
}

impl Detection {
    /// Planar pose, or `None` when the yaw is undefined.
    pub fn planar(&self) -> Option<Pose2<f64>> {
        project_se3_to_se2(&self.pose).ok()
    }
}

fn parse_flag(s: &str) -> Option<bool> {
    match s {
        "1" | "true" | "True" | "TRUE" => Some(true),
        "0" | "false" | "False" | "FALSE" => Some(false),
        _ => None,
    }
}

/// Parses `timestamp station_id fully_visible tx ty tz qx qy qz qw` rows.
///
/// `fully_visible` is `1`/`0` or `true`/`false`. Blank lines and `#` comments
/// are skipped. The result is sorted by timestamp (stable).
pub fn parse_detection_log(content: &str) -> Result<Vec<Detection>, IngestError> {
    let mut out = Vec::new();
    for (idx, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |message: String| IngestError::Parse {
            file: "detection log",
            row: idx + 1,
            message,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 10 {
            return Err(err(format!("expected 10 columns, got {}", fields.len())));
        }
        let num = |i: usize| -> Result<f64, IngestError> {
            match fields[i].parse::<f64>() {
                Ok(v) if v.is_finite() => Ok(v),
                _ => Err(err(format!(
                    "column {} `{}` is not a finite number",
                    i + 1,
                    fields[i]
                ))),
            }
        };
        let timestamp = num(0)?;
        let fully_visible = parse_flag(fields[2])
            .ok_or_else(|| err(format!("`{}` is not a visibility flag", fields[2])))?;
        let q = Quaternion::new(num(9)?, num(6)?, num(7)?, num(8)?);
        let rotation = UnitQuaternion::new_normalize(q).map_err(|e| err(e.to_string()))?;
        let pose = Pose3::new(Vec3::new(num(3)?, num(4)?, num(5)?), rotation);
        project_se3_to_se2(&pose).map_err(|e| err(e.to_string()))?;
        out.push(Detection {
            timestamp,
            station_id: fields[1].to_string(),
            pose,
            fully_visible,
        });
    }
    out.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    Ok(out)
}

/// Splits detections by station, each list sorted by timestamp.
pub fn group_by_station(detections: &[Detection]) -> BTreeMap<String, Vec<Detection>> {
    let mut groups: BTreeMap<String, Vec<Detection>> = BTreeMap::new();
    for d in detections {
        groups
            .entry(d.station_id.clone())
            .or_default()
            .push(d.clone());
    }
    for list in groups.values_mut() {
        list.sort_by(|a, b| a.timestamp.total_cmp(&b.timestamp));
    }
    groups
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_log() {
        assert!(parse_detection_log("").unwrap().is_empty());
        assert!(parse_detection_log("# only a comment\n\n")
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rows_are_sorted() {
        let log = "\
12.0 cam1 1 0.1 0.2 0.0 0 0 0 1
10.0 cam1 0 0.1 0.2 0.0 0 0 0.3826834323650898 0.9238795325112867
11.0 cam2 true 1 2 3 0 0 0 1
";
        let d = parse_detection_log(log).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(
            d.iter().map(|x| x.timestamp).collect::<Vec<_>>(),
            vec![10.0, 11.0, 12.0]
        );
        assert!(!d[0].fully_visible && d[1].fully_visible);
        let yaw = d[0].planar().unwrap().theta.radians();
        assert!((yaw - std::f64::consts::FRAC_PI_4).abs() < 1e-12);
        let groups = group_by_station(&d);
        assert_eq!(groups["cam1"].len(), 2);
        assert_eq!(groups["cam2"].len(), 1);
    }

    #[test]
    fn bad_rows_name_their_row() {
        let log = "10 cam1 1 0 0 0 0 0 0 1\nnan cam1 1 0 0 0 0 0 0 1\n";
        assert!(matches!(
            parse_detection_log(log),
            Err(IngestError::Parse { row: 2, .. })
        ));
        assert!(parse_detection_log("inf cam 1 0 0 0 0 0 0 1").is_err());
        assert!(parse_detection_log("1 cam maybe 0 0 0 0 0 0 1").is_err());
        assert!(parse_detection_log("1 cam 1 0 0 0 0 0 0 0").is_err());
        assert!(parse_detection_log("1 cam 1 0 0 0").is_err());
        // x-axis pointing straight up: no planar heading
        let up = std::f64::consts::FRAC_PI_4.sin();
        let log = format!("1 cam 1 0 0 0 0 {} 0 {}", -up, up);
        assert!(parse_detection_log(&log).is_err());
    }
}
