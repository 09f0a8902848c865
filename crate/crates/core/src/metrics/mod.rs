//! Waypoint accuracy, precision and completeness, plus the reporting
//! machinery built on them (cumulative curves, N-AUC, distribution summaries)
//! and the frame-wise SE(3) evaluator for open-loop trajectories.

mod curve;
mod framewise;
mod report;
mod summary;
mod trajectory;
mod waypoint;

pub use curve::{cumulative_curve, evenly_spaced, n_auc, CumulativeCurve};
pub use framewise::{framewise_metrics, FrameMetrics, FramewiseReport};
pub use report::{
    build_report, validate_document, AccuracyRow, CompletenessSection, CurveSection,
    DistributionSection, MetricsReport, PrecisionRow, References, ReportOptions, WaypointRow,
    REPORT_SCHEMA,
};
pub use summary::{distribution_summary, DistributionSummary};
pub use trajectory::{parse_trajectory, TimedPose, Trajectory};
pub use waypoint::{
    completeness, to_task_units, waypoint_accuracy, waypoint_precision, CompletenessResult,
    FramedPose, Quantity, WaypointAccuracy, WaypointIndicator, WaypointPrecision,
};

use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("frame mismatch: `{expected}` vs `{found}`")]
    FrameMismatch { expected: String, found: String },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
    #[error("no common frames across trajectories (first unmatched timestamp {timestamp})")]
    Association { timestamp: f64 },
    #[error("trajectory {trajectory} is not time-sorted at timestamp {timestamp}")]
    Unsorted { trajectory: usize, timestamp: f64 },
    #[error("trajectory line {line}: {message}")]
    Parse { line: usize, message: String },
}
