use std::collections::BTreeMap;

use super::IngestError;

/// Nominal arrival window of one (sequence, waypoint, round), robot clock.
#[derive(Debug, Clone, PartialEq)]
pub struct ScheduleEntry {
    pub sequence_id: String,
    pub waypoint_id: String,
    pub round: u32,
    pub t_start: f64,
    pub t_end: f64,
}

impl ScheduleEntry {
    pub fn label(&self) -> String {
        format!(
            "{}/{} round {}",
            self.sequence_id, self.waypoint_id, self.round
        )
    }
}

/// Which waypoint each station observes. No two stations share a waypoint.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct StationMap {
    to_waypoint: BTreeMap<String, String>,
    to_station: BTreeMap<String, String>,
}

impl StationMap {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds a station. Fails if the station or the waypoint is already mapped.
    pub fn insert(&mut self, station_id: &str, waypoint_id: &str) -> Result<(), String> {
        if let Some(w) = self.to_waypoint.get(station_id) {
            return Err(format!("station `{station_id}` already observes `{w}`"));
        }
        if let Some(s) = self.to_station.get(waypoint_id) {
            return Err(format!(
                "waypoint `{waypoint_id}` already observed by `{s}`"
            ));
        }
        self.to_waypoint
            .insert(station_id.into(), waypoint_id.into());
        self.to_station
            .insert(waypoint_id.into(), station_id.into());
        Ok(())
    }

    pub fn waypoint_of(&self, station_id: &str) -> Option<&str> {
        self.to_waypoint.get(station_id).map(String::as_str)
    }

    pub fn station_of(&self, waypoint_id: &str) -> Option<&str> {
        self.to_station.get(waypoint_id).map(String::as_str)
    }

    pub fn stations(&self) -> impl Iterator<Item = (&str, &str)> {
        self.to_waypoint
            .iter()
            .map(|(s, w)| (s.as_str(), w.as_str()))
    }

    pub fn len(&self) -> usize {
        self.to_waypoint.len()
    }

    pub fn is_empty(&self) -> bool {
        self.to_waypoint.is_empty()
    }
}

fn data_rows(content: &str) -> impl Iterator<Item = (usize, Vec<&str>)> {
    content.lines().enumerate().filter_map(|(i, raw)| {
        let line = raw.trim();
        (!line.is_empty() && !line.starts_with('#'))
            .then(|| (i + 1, line.split_whitespace().collect()))
    })
}

/// Parses `station_id waypoint_id` rows.
pub fn parse_station_map(content: &str) -> Result<StationMap, IngestError> {
    let mut map = StationMap::new();
    for (row, f) in data_rows(content) {
        let err = |message: String| IngestError::Parse {
            file: "station map",
            row,
            message,
        };
        if f.len() != 2 {
            return Err(err(format!("expected 2 columns, got {}", f.len())));
        }
        map.insert(f[0], f[1]).map_err(err)?;
    }
    Ok(map)
}

/// Parses `sequence_id waypoint_id round nominal_t_start nominal_t_end` rows.
pub fn parse_schedule(content: &str) -> Result<Vec<ScheduleEntry>, IngestError> {
    let mut out = Vec::new();
    for (row, f) in data_rows(content) {
        let err = |message: String| IngestError::Parse {
            file: "schedule",
            row,
            message,
        };
        if f.len() != 5 {
            return Err(err(format!("expected 5 columns, got {}", f.len())));
        }
        let round: u32 = f[2]
            .parse()
            .map_err(|_| err(format!("`{}` is not a round number", f[2])))?;
        let time = |s: &str| match s.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(v),
            _ => Err(err(format!("`{s}` is not a finite time"))),
        };
        let (t_start, t_end) = (time(f[3])?, time(f[4])?);
        if t_end < t_start {
            return Err(err(format!(
                "window ends before it starts ({t_start} > {t_end})"
            )));
        }
        out.push(ScheduleEntry {
            sequence_id: f[0].into(),
            waypoint_id: f[1].into(),
            round,
            t_start,
            t_end,
        });
    }
    Ok(out)
}
