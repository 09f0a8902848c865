use std::collections::BTreeMap;

use super::{IngestError, ScheduleEntry, StationMap, Visit};
use crate::task::{AttainmentRecord, AttainmentTable, TableError};

#[derive(Debug, Clone, PartialEq)]
pub struct Association {
    pub table: AttainmentTable,
    /// Visits that fall in no schedule window.
    pub orphans: Vec<Visit>,
    /// Schedule entries with exactly one visit.
    pub matched: usize,
}

/// Matches visits to schedule entries by time.
///
/// A visit belongs to the entry whose window, widened by `skew_tol` on both
/// sides, contains the visit midpoint. Only entries of the waypoint the
/// station observes are considered. Entries without a visit, and entries
/// whose visit never saw the whole tag, become failed attainments. Records
/// are expressed in the observing station's frame.
pub fn associate_visits(
    visits: &BTreeMap<String, Vec<Visit>>,
    schedule: &[ScheduleEntry],
    stations: &StationMap,
    skew_tol: f64,
) -> Result<Association, IngestError> {
    if let Some(unknown) = visits.keys().find(|s| stations.waypoint_of(s).is_none()) {
        return Err(IngestError::UnknownStation(unknown.clone()));
    }
    let rounds = schedule.iter().map(|e| e.round).max().unwrap_or(0);
    let mut table = AttainmentTable::new(rounds);

    let mut per_station: BTreeMap<&str, Vec<&ScheduleEntry>> = BTreeMap::new();
    for e in schedule {
        table.register_waypoint(&e.sequence_id, &e.waypoint_id);
        let station =
            stations
                .station_of(&e.waypoint_id)
                .ok_or_else(|| IngestError::Unobserved {
                    sequence_id: e.sequence_id.clone(),
                    waypoint_id: e.waypoint_id.clone(),
                })?;
        let list = per_station.entry(station).or_default();
        if let Some(prev) = list.last() {
            if !(prev.t_start < e.t_start) {
                return Err(IngestError::UnorderedSchedule {
                    station: station.into(),
                    sequence_id: e.sequence_id.clone(),
                    waypoint_id: e.waypoint_id.clone(),
                    round: e.round,
                });
            }
        }
        list.push(e);
    }

    let mut orphans = Vec::new();
    let mut matched = 0;
    let mut records = Vec::with_capacity(schedule.len());
    for (station, entries) in &per_station {
        let station_visits = visits.get(*station).map(Vec::as_slice).unwrap_or(&[]);
        let mut assigned: Vec<Vec<&Visit>> = vec![Vec::new(); entries.len()];
        for v in station_visits {
            let mid = v.midpoint();
            let hits: Vec<usize> = entries
                .iter()
                .enumerate()
                .filter(|(_, e)| e.t_start - skew_tol <= mid && mid <= e.t_end + skew_tol)
                .map(|(i, _)| i)
                .collect();
            match hits.as_slice() {
                [] => orphans.push(v.clone()),
                [i] => assigned[*i].push(v),
                _ => {
                    return Err(IngestError::AmbiguousVisit {
                        station: station.to_string(),
                        t_start: v.t_start,
                        t_end: v.t_end,
                        entries: hits.iter().map(|&i| entries[i].label()).collect(),
                    })
                }
            }
        }
        for (e, vs) in entries.iter().zip(assigned) {
            let record = match vs.as_slice() {
                [] => AttainmentRecord::failure(
                    &e.sequence_id,
                    &e.waypoint_id,
                    e.round,
                    *station,
                    e.t_start,
                ),
                [v] => {
                    matched += 1;
                    if v.fully_visible {
                        AttainmentRecord::success(
                            &e.sequence_id,
                            &e.waypoint_id,
                            e.round,
                            *station,
                            v.representative_time,
                            v.representative_pose,
                        )
                    } else {
                        AttainmentRecord::failure(
                            &e.sequence_id,
                            &e.waypoint_id,
                            e.round,
                            *station,
                            v.midpoint(),
                        )
                    }
                }
                many => {
                    return Err(IngestError::AmbiguousEntry {
                        sequence_id: e.sequence_id.clone(),
                        waypoint_id: e.waypoint_id.clone(),
                        round: e.round,
                        visits: many
                            .iter()
                            .map(|v| (v.station_id.clone(), v.t_start, v.t_end))
                            .collect(),
                    })
                }
            };
            records.push(record);
        }
    }
    for r in records {
        table.insert(r)?;
    }
    orphans.sort_by(|a, b| a.t_start.total_cmp(&b.t_start));
    Ok(Association {
        table,
        orphans,
        matched,
    })
}

/// Checks that every waypoint's records come from a single station frame.
///
/// Poses are left exactly as measured; no registration between stations is
/// attempted, so each waypoint is evaluated in its own local frame.
pub fn local_frame_records(table: AttainmentTable) -> Result<AttainmentTable, TableError> {
    for (s, w, cell) in table.cells() {
        let mut records = cell.records().iter();
        if let Some(first) = records.next() {
            if let Some(other) = records.find(|r| r.frame_id != first.frame_id) {
                return Err(TableError::FrameMismatch {
                    sequence_id: s.into(),
                    waypoint_id: w.into(),
                    first: first.frame_id.clone(),
                    second: other.frame_id.clone(),
                });
            }
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Pose2;
    use crate::metrics::completeness;

    fn visit(station: &str, t0: f64, t1: f64, visible: bool) -> Visit {
        Visit {
            station_id: station.into(),
            t_start: t0,
            t_end: t1,
            representative_pose: Pose2::new(0.1, 0.2, 0.3),
            representative_time: 0.5 * (t0 + t1),
            detection_count: 3,
            fully_visible: visible,
        }
    }

    fn entry(w: &str, round: u32, t0: f64, t1: f64) -> ScheduleEntry {
        ScheduleEntry {
            sequence_id: "tour".into(),
            waypoint_id: w.into(),
            round,
            t_start: t0,
            t_end: t1,
        }
    }

    fn stations() -> StationMap {
        let mut m = StationMap::new();
        m.insert("cam1", "w1").unwrap();
        m.insert("cam2", "w2").unwrap();
        m
    }

    fn by_station(vs: Vec<Visit>) -> BTreeMap<String, Vec<Visit>> {
        let mut m: BTreeMap<String, Vec<Visit>> = BTreeMap::new();
        for v in vs {
            m.entry(v.station_id.clone()).or_default().push(v);
        }
        m
    }

    #[test]
    fn midpoint_inside_widened_window() {
        // midpoint 100.4 inside [99.5, 105.5]
        let a = associate_visits(
            &by_station(vec![visit("cam1", 99.8, 101.0, true)]),
            &[entry("w1", 1, 99.5, 105.5)],
            &stations(),
            1.0,
        )
        .unwrap();
        assert_eq!(a.matched, 1);
        let cell = a.table.cell("tour", "w1").unwrap();
        assert_eq!(cell.success_count(), 1);
        assert_eq!(cell.records()[0].frame_id, "cam1");

        // skew: midpoint 0.9 s before the window still matches
        let a = associate_visits(
            &by_station(vec![visit("cam1", 98.4, 98.8, true)]),
            &[entry("w1", 1, 99.5, 105.5)],
            &stations(),
            1.0,
        )
        .unwrap();
        assert_eq!(a.matched, 1);
    }

    #[test]
    fn missing_round_makes_waypoint_incomplete() {
        let schedule: Vec<ScheduleEntry> = (1..=5)
            .flat_map(|j| {
                let t = 100.0 * j as f64;
                [
                    entry("w1", j, t, t + 5.0),
                    entry("w2", j, t + 20.0, t + 25.0),
                ]
            })
            .collect();
        let visits: Vec<Visit> = (1..=5)
            .flat_map(|j| {
                let t = 100.0 * j as f64;
                let mut v = vec![visit("cam1", t + 1.0, t + 4.0, true)];
                if j != 3 {
                    v.push(visit("cam2", t + 21.0, t + 24.0, true));
                }
                v
            })
            .collect();
        let a = associate_visits(&by_station(visits), &schedule, &stations(), 1.0).unwrap();
        assert_eq!(a.table.success_count("tour", "w2"), 4);
        let cell = a.table.cell("tour", "w2").unwrap();
        assert!(!cell
            .records()
            .iter()
            .find(|r| r.round == 3)
            .unwrap()
            .is_success());
        let c = completeness(&a.table, 5);
        assert_eq!((c.completed, c.total), (1, 2));
    }

    #[test]
    fn hidden_tag_is_a_failure() {
        let a = associate_visits(
            &by_station(vec![visit("cam1", 10.0, 13.0, false)]),
            &[entry("w1", 1, 10.0, 15.0)],
            &stations(),
            1.0,
        )
        .unwrap();
        assert_eq!(a.matched, 1);
        assert_eq!(a.table.success_count("tour", "w1"), 0);
    }

    #[test]
    fn orphans_and_errors() {
        let a = associate_visits(
            &by_station(vec![visit("cam1", 50.0, 52.0, true)]),
            &[entry("w1", 1, 10.0, 15.0)],
            &stations(),
            1.0,
        )
        .unwrap();
        assert_eq!(a.orphans.len(), 1);
        assert_eq!(a.table.success_count("tour", "w1"), 0);

        let two = associate_visits(
            &by_station(vec![
                visit("cam1", 10.0, 11.0, true),
                visit("cam1", 13.0, 14.0, true),
            ]),
            &[entry("w1", 1, 10.0, 15.0)],
            &stations(),
            1.0,
        );
        match two {
            Err(e @ IngestError::AmbiguousEntry { .. }) => {
                assert!(e.is_ambiguity());
                let msg = e.to_string();
                assert!(
                    msg.contains("[10, 11]") && msg.contains("[13, 14]"),
                    "{msg}"
                );
            }
            other => panic!("{other:?}"),
        }

        let overlap = associate_visits(
            &by_station(vec![visit("cam1", 15.0, 16.0, true)]),
            &[entry("w1", 1, 10.0, 15.0), entry("w1", 2, 16.5, 20.0)],
            &stations(),
            1.0,
        );
        assert!(matches!(overlap, Err(IngestError::AmbiguousVisit { .. })));

        assert!(matches!(
            associate_visits(
                &by_station(vec![visit("cam9", 10.0, 11.0, true)]),
                &[],
                &stations(),
                1.0
            ),
            Err(IngestError::UnknownStation(_))
        ));
        assert!(matches!(
            associate_visits(
                &BTreeMap::new(),
                &[entry("w7", 1, 0.0, 1.0)],
                &stations(),
                1.0
            ),
            Err(IngestError::Unobserved { .. })
        ));
        assert!(matches!(
            associate_visits(
                &BTreeMap::new(),
                &[entry("w1", 2, 50.0, 51.0), entry("w1", 1, 10.0, 11.0)],
                &stations(),
                1.0
            ),
            Err(IngestError::UnorderedSchedule { .. })
        ));
    }

    #[test]
    fn local_frames() {
        let a = associate_visits(
            &by_station(vec![visit("cam1", 10.0, 11.0, true)]),
            &[entry("w1", 1, 10.0, 15.0), entry("w1", 2, 30.0, 35.0)],
            &stations(),
            1.0,
        )
        .unwrap();
        let before = a.table.clone();
        let after = local_frame_records(a.table).unwrap();
        assert_eq!(before, after);
        assert!(after.records().all(|r| r.frame_id == "cam1"));

        let mut mixed = AttainmentTable::new(2);
        let p = Pose2::identity();
        mixed
            .insert(AttainmentRecord::success("tour", "w1", 1, "cam1", 0.0, p))
            .unwrap();
        mixed
            .insert(AttainmentRecord::success("tour", "w1", 2, "cam2", 1.0, p))
            .unwrap();
        assert!(matches!(
            local_frame_records(mixed),
            Err(TableError::FrameMismatch { .. })
        ));
    }
}
