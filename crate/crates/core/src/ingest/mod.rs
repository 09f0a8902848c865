//! Turning tag-detection logs into attainment tables.
//!
//! Each station (a camera watching one waypoint, or a tag seen by the robot's
//! camera) is processed on its own: detections are clustered into visits,
//! visits are matched to the robot's nominal arrival schedule, and the
//! resulting poses stay in the station's own frame.

mod associate;
mod detection;
mod schedule;
mod visit;

pub use associate::{associate_visits, local_frame_records, Association};
pub use detection::{group_by_station, parse_detection_log, Detection};
pub use schedule::{parse_schedule, parse_station_map, ScheduleEntry, StationMap};
pub use visit::{cluster_visits, Visit};

use std::collections::BTreeMap;

use thiserror::Error;

use crate::task::TableError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum IngestError {
    #[error("{file} row {row}: {message}")]
    Parse {
        file: &'static str,
        row: usize,
        message: String,
    },
    #[error("station `{0}` is not in the station map")]
    UnknownStation(String),
    #[error("no station observes waypoint {sequence_id}/{waypoint_id}")]
    Unobserved {
        sequence_id: String,
        waypoint_id: String,
    },
    #[error("schedule for station `{station}` is not ordered in time at {sequence_id}/{waypoint_id} round {round}")]
    UnorderedSchedule {
        station: String,
        sequence_id: String,
        waypoint_id: String,
        round: u32,
    },
    #[error("{sequence_id}/{waypoint_id} round {round} matched by several visits: {}", fmt_windows(.visits))]
    AmbiguousEntry {
        sequence_id: String,
        waypoint_id: String,
        round: u32,
        visits: Vec<(String, f64, f64)>,
    },
    #[error("visit of `{station}` [{t_start}, {t_end}] falls in several schedule windows: {}", .entries.join(", "))]
    AmbiguousVisit {
        station: String,
        t_start: f64,
        t_end: f64,
        entries: Vec<String>,
    },
    #[error(transparent)]
    Table(#[from] TableError),
}

fn fmt_windows(visits: &[(String, f64, f64)]) -> String {
    visits
        .iter()
        .map(|(s, a, b)| format!("{s} [{a}, {b}]"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl IngestError {
    /// True for errors caused by conflicting data rather than malformed input.
    pub fn is_ambiguity(&self) -> bool {
        matches!(
            self,
            IngestError::AmbiguousEntry { .. } | IngestError::AmbiguousVisit { .. }
        )
    }
}

/// Clustering and association thresholds, in seconds.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IngestParams {
    /// Largest gap between detections of one visit.
    pub gap_max: f64,
    /// Shortest visit kept.
    pub dwell_min: f64,
    /// Allowed clock offset between stations and the robot.
    pub skew_tol: f64,
}

impl Default for IngestParams {
    fn default() -> Self {
        IngestParams {
            gap_max: 10.0,
            dwell_min: 2.0,
            skew_tol: 1.0,
        }
    }
}

/// Runs clustering on every station, then association and the frame check.
pub fn ingest(
    detections: &[Detection],
    schedule: &[ScheduleEntry],
    stations: &StationMap,
    params: &IngestParams,
) -> Result<Association, IngestError> {
    let visits: BTreeMap<String, Vec<Visit>> = group_by_station(detections)
        .into_iter()
        .map(|(station, dets)| {
            let v = cluster_visits(&dets, params.gap_max, params.dwell_min);
            (station, v)
        })
        .collect();
    let mut assoc = associate_visits(&visits, schedule, stations, params.skew_tol)?;
    assoc.table = local_frame_records(assoc.table)?;
    Ok(assoc)
}
