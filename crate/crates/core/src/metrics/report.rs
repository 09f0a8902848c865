//! Aggregate waypoint report and its document form.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{
    completeness, cumulative_curve, distribution_summary, evenly_spaced, n_auc, to_task_units,
    waypoint_accuracy, waypoint_precision, DistributionSummary, FramedPose, MetricsError, Quantity,
};
use crate::geometry::Pose2;
use crate::task::{AttainmentTable, RobotProfile, Scenario, TASK_FRAME};

/// Identifier embedded in every report document.
pub const REPORT_SCHEMA: &str = "navbench.metrics-report/1";

/// Reference poses for accuracy, all expressed in one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct References {
    pub frame_id: String,
    pub poses: BTreeMap<(String, String), Pose2<f64>>,
}

impl References {
    /// Waypoint targets of a scenario, in the task frame.
    pub fn from_scenario(scenario: &Scenario) -> Self {
        let poses = scenario
            .sequences
            .iter()
            .flat_map(|s| {
                s.waypoints
                    .iter()
                    .map(move |w| ((s.id.clone(), w.id.clone()), w.pose))
            })
            .collect();
        References {
            frame_id: TASK_FRAME.to_string(),
            poses,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReportOptions {
    /// Defaults to 1.5 robot diameters.
    pub x_max_position: Option<f64>,
    /// Defaults to a quarter of the field of view.
    pub x_max_orientation: Option<f64>,
    pub curve_points: usize,
}

impl Default for ReportOptions {
    fn default() -> Self {
        ReportOptions {
            x_max_position: None,
            x_max_orientation: None,
            curve_points: 200,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PrecisionRow {
    pub position_m: f64,
    pub orientation_rad: f64,
    pub position_d: f64,
    pub orientation_fov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AccuracyRow {
    pub position_m: f64,
    pub orientation_rad: f64,
    pub position_d: f64,
    pub orientation_fov: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WaypointRow {
    pub sequence_id: String,
    pub waypoint_id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub frame_id: Option<String>,
    pub attained: u32,
    pub complete: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision: Option<PrecisionRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy: Option<AccuracyRow>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CompletenessSection {
    pub ratio: f64,
    pub completed: usize,
    pub total: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CurveSection {
    pub unit: String,
    pub x_max: f64,
    pub n_auc: f64,
    pub points: Vec<[f64; 2]>,
}

impl CurveSection {
    /// Columnar `threshold,fraction` text for external plotting.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("threshold,fraction\n");
        for [t, f] in &self.points {
            out.push_str(&format!("{t},{f}\n"));
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistributionSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_position_m: Option<DistributionSummary<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub precision_orientation_rad: Option<DistributionSummary<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_position_m: Option<DistributionSummary<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub accuracy_orientation_rad: Option<DistributionSummary<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub schema: String,
    pub rounds: u32,
    pub diameter_m: f64,
    pub fov_deg: f64,
    pub completeness: CompletenessSection,
    pub waypoints: Vec<WaypointRow>,
    pub position_curve: CurveSection,
    pub orientation_curve: CurveSection,
    pub distributions: DistributionSection,
}

impl MetricsReport {
    pub fn has_accuracy(&self) -> bool {
        self.waypoints.iter().any(|w| w.accuracy.is_some())
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    /// Checks the structural invariants every emitted report must satisfy.
    pub fn validate(&self) -> Result<(), String> {
        if self.schema != REPORT_SCHEMA {
            return Err(format!("unknown schema `{}`", self.schema));
        }
        let c = &self.completeness;
        if c.total != self.waypoints.len() || c.completed > c.total {
            return Err("completeness counts disagree with waypoint rows".into());
        }
        let complete_rows = self.waypoints.iter().filter(|w| w.complete).count();
        if complete_rows != c.completed {
            return Err("completed count disagrees with waypoint rows".into());
        }
        if !(0.0..=1.0).contains(&c.ratio) {
            return Err(format!("completeness {} outside [0, 1]", c.ratio));
        }
        for w in &self.waypoints {
            if w.attained > self.rounds {
                return Err(format!(
                    "{}/{} attained more than M rounds",
                    w.sequence_id, w.waypoint_id
                ));
            }
            if w.complete != (w.attained == self.rounds) {
                return Err(format!(
                    "{}/{} completion flag inconsistent",
                    w.sequence_id, w.waypoint_id
                ));
            }
            let nonneg = |v: f64| v.is_finite() && v >= 0.0;
            if let Some(p) = &w.precision {
                if ![
                    p.position_m,
                    p.orientation_rad,
                    p.position_d,
                    p.orientation_fov,
                ]
                .into_iter()
                .all(nonneg)
                    || p.orientation_rad > std::f64::consts::PI
                {
                    return Err(format!(
                        "{}/{} precision out of range",
                        w.sequence_id, w.waypoint_id
                    ));
                }
            }
            if let Some(a) = &w.accuracy {
                if ![
                    a.position_m,
                    a.orientation_rad,
                    a.position_d,
                    a.orientation_fov,
                ]
                .into_iter()
                .all(nonneg)
                    || a.orientation_rad > std::f64::consts::PI
                {
                    return Err(format!(
                        "{}/{} accuracy out of range",
                        w.sequence_id, w.waypoint_id
                    ));
                }
            }
        }
        for curve in [&self.position_curve, &self.orientation_curve] {
            if !(curve.x_max > 0.0) || !(0.0..=1.0).contains(&curve.n_auc) {
                return Err(format!("{} curve range or N-AUC invalid", curve.unit));
            }
            if curve
                .points
                .windows(2)
                .any(|w| w[1][0] <= w[0][0] || w[1][1] < w[0][1])
            {
                return Err(format!("{} curve not monotone", curve.unit));
            }
            if curve
                .points
                .iter()
                .any(|p| p[1] < 0.0 || p[1] > c.ratio + 1e-12)
            {
                return Err(format!("{} curve exceeds completeness", curve.unit));
            }
        }
        let d = &self.distributions;
        for s in [
            &d.precision_position_m,
            &d.precision_orientation_rad,
            &d.accuracy_position_m,
            &d.accuracy_orientation_rad,
        ]
        .into_iter()
        .flatten()
        {
            if !(s.min <= s.q1 && s.q1 <= s.median && s.median <= s.q3 && s.q3 <= s.max) {
                return Err("distribution quartiles out of order".into());
            }
        }
        Ok(())
    }
}

/// Parses a report document strictly and checks its invariants.
pub fn validate_document(document: &str) -> Result<MetricsReport, String> {
    let report: MetricsReport = serde_json::from_str(document).map_err(|e| e.to_string())?;
    report.validate()?;
    Ok(report)
}

/// Evaluates every waypoint of `table`.
///
/// Precision (and accuracy, where a reference in the same frame exists) is
/// reported per waypoint; only completed waypoints feed the curves and
/// distributions. A waypoint whose heading mean is undefined keeps an error
/// note and contributes no precision value.
pub fn build_report(
    table: &AttainmentTable,
    references: Option<&References>,
    profile: &RobotProfile,
    options: &ReportOptions,
) -> Result<MetricsReport, MetricsError> {
    let rounds = table.rounds();
    let comp = completeness(table, rounds);
    let x_max_position = options.x_max_position.unwrap_or(1.5 * profile.diameter_m);
    let x_max_orientation = options.x_max_orientation.unwrap_or(profile.fov_rad() / 4.0);

    let mut rows = Vec::new();
    let (mut pre_pos, mut pre_ang, mut acc_pos, mut acc_ang) =
        (Vec::new(), Vec::new(), Vec::new(), Vec::new());

    for ((s, w, cell), ind) in table.cells().zip(&comp.indicators) {
        debug_assert_eq!((s, w), (ind.sequence_id.as_str(), ind.waypoint_id.as_str()));
        let mut row = WaypointRow {
            sequence_id: s.to_string(),
            waypoint_id: w.to_string(),
            frame_id: None,
            attained: ind.attained,
            complete: ind.complete,
            precision: None,
            accuracy: None,
            error: None,
        };
        let frame = match cell.frame_id() {
            Ok(f) => f,
            Err(e) => {
                row.error = Some(e.to_string());
                rows.push(row);
                continue;
            }
        };
        row.frame_id = frame.map(str::to_string);
        let framed: Vec<FramedPose<'_, f64>> = cell
            .evaluated()
            .map(|r| {
                FramedPose::new(
                    r.frame_id.as_str(),
                    r.pose.expect("evaluated record has a pose"),
                )
            })
            .collect();
        if !framed.is_empty() {
            match waypoint_precision(&framed) {
                Ok(p) => {
                    row.precision = Some(PrecisionRow {
                        position_m: p.position,
                        orientation_rad: p.orientation,
                        position_d: to_task_units(p.position, Quantity::Position, profile),
                        orientation_fov: to_task_units(
                            p.orientation,
                            Quantity::Orientation,
                            profile,
                        ),
                    });
                    if ind.complete {
                        pre_pos.push(p.position);
                        pre_ang.push(p.orientation);
                    }
                }
                Err(e) => row.error = Some(e.to_string()),
            }
            let reference = references.and_then(|refs| {
                refs.poses
                    .get(&(s.to_string(), w.to_string()))
                    .map(|p| FramedPose::new(refs.frame_id.as_str(), *p))
            });
            if let Some(reference) = reference.filter(|r| Some(r.frame) == frame) {
                let a = waypoint_accuracy(&framed, &reference)?;
                row.accuracy = Some(AccuracyRow {
                    position_m: a.position,
                    orientation_rad: a.orientation,
                    position_d: to_task_units(a.position, Quantity::Position, profile),
                    orientation_fov: to_task_units(a.orientation, Quantity::Orientation, profile),
                });
                if ind.complete {
                    acc_pos.push(a.position);
                    acc_ang.push(a.orientation);
                }
            }
        }
        rows.push(row);
    }

    let curve_section =
        |values: &[f64], x_max: f64, unit: &str| -> Result<CurveSection, MetricsError> {
            let curve = cumulative_curve(
                values,
                comp.total,
                &evenly_spaced(x_max, options.curve_points.max(2)),
            )?;
            Ok(CurveSection {
                unit: unit.to_string(),
                x_max,
                n_auc: n_auc(&curve),
                points: curve.points().map(|(t, f)| [t, f]).collect(),
            })
        };
    let summary = |v: &[f64]| {
        if v.is_empty() {
            None
        } else {
            distribution_summary(v).ok()
        }
    };

    Ok(MetricsReport {
        schema: REPORT_SCHEMA.to_string(),
        rounds,
        diameter_m: profile.diameter_m,
        fov_deg: profile.fov_deg,
        completeness: CompletenessSection {
            ratio: comp.ratio,
            completed: comp.completed,
            total: comp.total,
        },
        waypoints: rows,
        position_curve: curve_section(&pre_pos, x_max_position, "m")?,
        orientation_curve: curve_section(&pre_ang, x_max_orientation, "rad")?,
        distributions: DistributionSection {
            precision_position_m: summary(&pre_pos),
            precision_orientation_rad: summary(&pre_ang),
            accuracy_position_m: summary(&acc_pos),
            accuracy_orientation_rad: summary(&acc_ang),
        },
    })
}
