use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::OccupancyGrid;
use crate::geometry::Pose2;

/// The bundled two-room sample scenario (6 waypoints, 5 rounds).
pub const SMALL_HOUSE: &str = include_str!("../../scenarios/small_house.toml");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ScenarioError {
    #[error("scenario parse error: {0}")]
    Parse(String),
    #[error("invalid scenario field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

fn invalid(field: impl Into<String>, message: impl Into<String>) -> ScenarioError {
    ScenarioError::Invalid {
        field: field.into(),
        message: message.into(),
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Waypoint {
    pub id: String,
    pub pose: Pose2<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sequence {
    pub id: String,
    pub start_pose: Pose2<f64>,
    pub waypoints: Vec<Waypoint>,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotProfile {
    pub diameter_m: f64,
    pub fov_deg: f64,
}

impl RobotProfile {
    pub fn new(diameter_m: f64, fov_deg: f64) -> Result<Self, ScenarioError> {
        if !(diameter_m > 0.0 && diameter_m.is_finite()) {
            return Err(invalid(
                "robot.diameter_m",
                format!("must be > 0, got {diameter_m}"),
            ));
        }
        if !(fov_deg > 0.0 && fov_deg < 360.0) {
            return Err(invalid(
                "robot.fov_deg",
                format!("must be in (0, 360), got {fov_deg}"),
            ));
        }
        Ok(RobotProfile {
            diameter_m,
            fov_deg,
        })
    }

    pub fn fov_rad(&self) -> f64 {
        self.fov_deg.to_radians()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    WithoutMap,
    WithMap,
}

impl Mode {
    pub fn as_str(&self) -> &'static str {
        match self {
            Mode::WithoutMap => "without_map",
            Mode::WithMap => "with_map",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Protocol {
    pub rounds: u32,
    pub mode: Mode,
    pub pause_s: f64,
    pub arrival_pos_tol_m: f64,
    pub arrival_ang_tol_rad: f64,
    pub timeout_s: f64,
}

impl Default for Protocol {
    fn default() -> Self {
        Protocol {
            rounds: 5,
            mode: Mode::WithoutMap,
            pause_s: 5.0,
            arrival_pos_tol_m: 0.05,
            arrival_ang_tol_rad: 0.05,
            timeout_s: 120.0,
        }
    }
}

impl Protocol {
    fn validate(&self) -> Result<(), ScenarioError> {
        if self.rounds < 1 {
            return Err(invalid("protocol.rounds", "must be >= 1"));
        }
        if !(self.pause_s >= 0.0 && self.pause_s.is_finite()) {
            return Err(invalid("protocol.pause_s", "must be >= 0"));
        }
        for (name, v) in [
            ("protocol.arrival_pos_tol_m", self.arrival_pos_tol_m),
            ("protocol.arrival_ang_tol_rad", self.arrival_ang_tol_rad),
            ("protocol.timeout_s", self.timeout_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(invalid(name, format!("must be > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    pub robot: RobotProfile,
    pub protocol: Protocol,
    pub sequences: Vec<Sequence>,
    pub map: Option<OccupancyGrid>,
}

impl Scenario {
    pub fn waypoint_count(&self) -> usize {
        self.sequences.iter().map(|s| s.waypoints.len()).sum()
    }

    pub fn waypoint(&self, sequence_id: &str, waypoint_id: &str) -> Option<&Waypoint> {
        self.sequences
            .iter()
            .find(|s| s.id == sequence_id)?
            .waypoints
            .iter()
            .find(|w| w.id == waypoint_id)
    }

    pub fn to_toml_string(&self) -> String {
        let doc = ScenarioDoc::from(self);
        toml::to_string(&doc).expect("scenario document serializes")
    }

    /// Rejects legs (including the wrap-around from the last waypoint back to
    /// the first) that cross an occupied or unknown cell.
    fn check_legs(&self, grid: &OccupancyGrid) -> Result<(), ScenarioError> {
        for (k, seq) in self.sequences.iter().enumerate() {
            let mut legs = Vec::new();
            let mut prev = ("start".to_string(), seq.start_pose);
            for w in &seq.waypoints {
                legs.push((prev.0.clone(), prev.1, w.id.clone(), w.pose));
                prev = (w.id.clone(), w.pose);
            }
            if seq.waypoints.len() > 1 {
                let first = &seq.waypoints[0];
                legs.push((prev.0, prev.1, first.id.clone(), first.pose));
            }
            for (from_id, from, to_id, to) in legs {
                if let Some((x, y)) = grid.first_blocked_point((from.x, from.y), (to.x, to.y)) {
                    return Err(invalid(
                        format!("sequences[{k}]"),
                        format!("leg {from_id} -> {to_id} is blocked near ({x:.3}, {y:.3})"),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Parses and validates a scenario document.
pub fn load_scenario(document: &str) -> Result<Scenario, ScenarioError> {
    let doc: ScenarioDoc =
        toml::from_str(document).map_err(|e| ScenarioError::Parse(e.to_string()))?;
    doc.into_scenario()
}

fn default_rounds() -> u32 {
    Protocol::default().rounds
}
fn default_mode() -> Mode {
    Protocol::default().mode
}
fn default_pause() -> f64 {
    Protocol::default().pause_s
}
fn default_pos_tol() -> f64 {
    Protocol::default().arrival_pos_tol_m
}
fn default_ang_tol() -> f64 {
    Protocol::default().arrival_ang_tol_rad
}
fn default_timeout() -> f64 {
    Protocol::default().timeout_s
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioDoc {
    robot: RobotDoc,
    #[serde(default)]
    protocol: Option<ProtocolDoc>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    map: Option<OccupancyGrid>,
    sequences: Vec<SequenceDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RobotDoc {
    diameter_m: f64,
    fov_deg: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ProtocolDoc {
    #[serde(default = "default_rounds")]
    rounds: u32,
    #[serde(default = "default_mode")]
    mode: Mode,
    #[serde(default = "default_pause")]
    pause_s: f64,
    #[serde(default = "default_pos_tol")]
    arrival_pos_tol_m: f64,
    #[serde(default = "default_ang_tol")]
    arrival_ang_tol_rad: f64,
    #[serde(default = "default_timeout")]
    timeout_s: f64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct SequenceDoc {
    id: String,
    start: [f64; 3],
    waypoints: Vec<WaypointDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct WaypointDoc {
    id: String,
    pose: [f64; 3],
}

fn pose_field(field: String, p: [f64; 3]) -> Result<Pose2<f64>, ScenarioError> {
    Pose2::try_new(p[0], p[1], p[2]).map_err(|e| invalid(field, e.to_string()))
}

fn pose_doc(p: &Pose2<f64>) -> [f64; 3] {
    [p.x, p.y, p.heading()]
}

impl ScenarioDoc {
    fn into_scenario(self) -> Result<Scenario, ScenarioError> {
        let robot = RobotProfile::new(self.robot.diameter_m, self.robot.fov_deg)?;
        let protocol = match self.protocol {
            Some(p) => Protocol {
                rounds: p.rounds,
                mode: p.mode,
                pause_s: p.pause_s,
                arrival_pos_tol_m: p.arrival_pos_tol_m,
                arrival_ang_tol_rad: p.arrival_ang_tol_rad,
                timeout_s: p.timeout_s,
            },
            None => Protocol::default(),
        };
        protocol.validate()?;

        if self.sequences.is_empty() {
            return Err(invalid("sequences", "at least one sequence is required"));
        }
        let mut seq_ids = HashSet::new();
        let mut sequences = Vec::with_capacity(self.sequences.len());
        for (k, s) in self.sequences.into_iter().enumerate() {
            if s.id.trim().is_empty() || s.id.contains([',', ' ', '\t']) {
                return Err(invalid(
                    format!("sequences[{k}].id"),
                    format!("`{}` must be non-empty without commas or whitespace", s.id),
                ));
            }
            if !seq_ids.insert(s.id.clone()) {
                return Err(invalid(
                    format!("sequences[{k}].id"),
                    format!("duplicate sequence id `{}`", s.id),
                ));
            }
            if s.waypoints.is_empty() {
                return Err(invalid(
                    format!("sequences[{k}].waypoints"),
                    format!("sequence `{}` has no waypoints", s.id),
                ));
            }
            let start_pose = pose_field(format!("sequences[{k}].start"), s.start)?;
            let mut wp_ids = HashSet::new();
            let mut waypoints = Vec::with_capacity(s.waypoints.len());
            for (i, w) in s.waypoints.into_iter().enumerate() {
                let field = format!("sequences[{k}].waypoints[{i}]");
                if w.id.trim().is_empty() || w.id.contains([',', ' ', '\t']) {
                    return Err(invalid(
                        format!("{field}.id"),
                        format!("`{}` must be non-empty without commas or whitespace", w.id),
                    ));
                }
                if !wp_ids.insert(w.id.clone()) {
                    return Err(invalid(
                        format!("{field}.id"),
                        format!("duplicate waypoint id `{}` in sequence `{}`", w.id, s.id),
                    ));
                }
                waypoints.push(Waypoint {
                    pose: pose_field(format!("{field}.pose"), w.pose)?,
                    id: w.id,
                });
            }
            sequences.push(Sequence {
                id: s.id,
                start_pose,
                waypoints,
            });
        }

        let scenario = Scenario {
            robot,
            protocol,
            sequences,
            map: self.map,
        };
        if let Some(grid) = &scenario.map {
            grid.validate().map_err(|m| invalid("map", m))?;
            scenario.check_legs(grid)?;
        }
        Ok(scenario)
    }
}

impl From<&Scenario> for ScenarioDoc {
    fn from(s: &Scenario) -> Self {
        ScenarioDoc {
            robot: RobotDoc {
                diameter_m: s.robot.diameter_m,
                fov_deg: s.robot.fov_deg,
            },
            protocol: Some(ProtocolDoc {
                rounds: s.protocol.rounds,
                mode: s.protocol.mode,
                pause_s: s.protocol.pause_s,
                arrival_pos_tol_m: s.protocol.arrival_pos_tol_m,
                arrival_ang_tol_rad: s.protocol.arrival_ang_tol_rad,
                timeout_s: s.protocol.timeout_s,
            }),
            map: s.map.clone(),
            sequences: s
                .sequences
                .iter()
                .map(|q| SequenceDoc {
                    id: q.id.clone(),
                    start: pose_doc(&q.start_pose),
                    waypoints: q
                        .waypoints
                        .iter()
                        .map(|w| WaypointDoc {
                            id: w.id.clone(),
                            pose: pose_doc(&w.pose),
                        })
                        .collect(),
                })
                .collect(),
        }
    }
}
