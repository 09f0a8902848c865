use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{
    goto_waypoint, Arrival, ControllerGains, Localizer, LocalizerSpec, Outcome, RobotState,
    SimError,
};
use crate::geometry::Pose2;
use crate::ingest::ScheduleEntry;
use crate::metrics::References;
use crate::task::{AttainmentRecord, AttainmentTable, Mode, Scenario, TASK_FRAME};

#[derive(Debug, Clone, PartialEq)]
pub struct SimRunConfig {
    pub scenario: Scenario,
    pub localizer: LocalizerSpec,
    pub seed: u64,
    /// Control and localization period, seconds.
    pub dt: f64,
    pub gains: ControllerGains,
    pub mode: Mode,
    /// Keep per-step pose logs in the output.
    pub record_trajectories: bool,
}

impl SimRunConfig {
    /// Defaults for everything but the scenario, localizer and seed. The mode
    /// comes from the scenario's protocol.
    pub fn new(scenario: Scenario, localizer: LocalizerSpec, seed: u64) -> Self {
        let mode = scenario.protocol.mode;
        SimRunConfig {
            scenario,
            localizer,
            seed,
            dt: 0.05,
            gains: ControllerGains::default(),
            mode,
            record_trajectories: true,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(SimError::invalid(
                "dt",
                format!("must be > 0, got {}", self.dt),
            ));
        }
        self.localizer.validate()?;
        self.gains.validate()?;
        let p = &self.scenario.protocol;
        if !(p.timeout_s.is_finite() && p.timeout_s > 0.0) {
            return Err(SimError::invalid("protocol.timeout_s", "must be > 0"));
        }
        if !(p.pause_s.is_finite() && p.pause_s >= 0.0) {
            return Err(SimError::invalid("protocol.pause_s", "must be >= 0"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct WaypointOutcome {
    pub sequence_id: String,
    pub waypoint_id: String,
    pub round: u32,
    pub outcome: Outcome,
    /// Simulated time the attempt ended.
    pub time: f64,
}

/// Per-step true and estimated poses of one sequence, all rounds.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrajectoryLog {
    pub sequence_id: String,
    pub truth: Vec<(f64, Pose2<f64>)>,
    pub estimate: Vec<(f64, Pose2<f64>)>,
}

/// Rows of `t x y theta`.
pub fn format_pose_rows(rows: &[(f64, Pose2<f64>)]) -> String {
    let mut out = String::with_capacity(rows.len() * 48);
    for (t, p) in rows {
        out.push_str(&format!("{t:.3} {} {} {}\n", p.x, p.y, p.heading()));
    }
    out
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimOutput {
    pub table: AttainmentTable,
    pub references: References,
    pub outcomes: Vec<WaypointOutcome>,
    /// Nominal arrival windows `[arrival, arrival + pause]`. Failed and
    /// skipped attempts get a zero-length window at the time of failure.
    pub schedule: Vec<ScheduleEntry>,
    pub trajectories: Vec<TrajectoryLog>,
}

/// Independent random stream for one waypoint attempt.
fn stream_id(round: u32, sequence: usize, waypoint: usize) -> u64 {
    ((round as u64) << 40) | ((sequence as u64 & 0xff_ffff) << 16) | (waypoint as u64 & 0xffff)
}

/// Runs every sequence of the scenario for the configured rounds.
///
/// Without a map the robot is put back on the start pose and the localizer
/// is reset before each round. With a map, an extra round 0 builds the map
/// (its records are kept but excluded from evaluation) and later rounds
/// continue from wherever the previous round ended. A failed waypoint ends
/// the round; the remaining waypoints are recorded as failures, and the
/// robot is returned to the start pose before the next round.
pub fn run_benchmark(config: &SimRunConfig) -> Result<SimOutput, SimError> {
    config.validate()?;
    let scenario = &config.scenario;
    let protocol = &scenario.protocol;
    let tol = Arrival {
        pos_tol: protocol.arrival_pos_tol_m,
        ang_tol: protocol.arrival_ang_tol_rad,
        timeout_s: protocol.timeout_s,
    };
    let bias_seed = config.localizer.bias_seed.unwrap_or(config.seed);
    let first_round = match config.mode {
        Mode::WithoutMap => 1,
        Mode::WithMap => 0,
    };

    let mut table = AttainmentTable::new(protocol.rounds);
    let mut outcomes = Vec::new();
    let mut schedule = Vec::new();
    let mut trajectories = Vec::new();
    let mut time = 0.0;

    for (si, seq) in scenario.sequences.iter().enumerate() {
        for w in &seq.waypoints {
            table.register_waypoint(&seq.id, &w.id);
        }
        let mut log = TrajectoryLog {
            sequence_id: seq.id.clone(),
            ..TrajectoryLog::default()
        };
        let mut localizer = Localizer::new(config.localizer.clone(), bias_seed, seq.start_pose);
        let mut state = RobotState::at(seq.start_pose, time);
        let mut restart = true;

        for round in first_round..=protocol.rounds {
            if restart || config.mode == Mode::WithoutMap {
                state = RobotState::at(seq.start_pose, time);
                localizer.reset(seq.start_pose);
                state.estimated_pose = localizer.estimate();
            }
            restart = false;
            let mut aborted = false;
            for (wi, wp) in seq.waypoints.iter().enumerate() {
                if aborted {
                    table.insert(AttainmentRecord::failure(
                        &seq.id, &wp.id, round, TASK_FRAME, time,
                    ))?;
                    schedule.push(entry(&seq.id, &wp.id, round, time, time));
                    outcomes.push(outcome(&seq.id, &wp.id, round, Outcome::Skipped, time));
                    continue;
                }
                let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
                rng.set_stream(stream_id(round, si, wi));
                let record = config.record_trajectories;
                let (result, end) = goto_waypoint(
                    state,
                    &wp.pose,
                    &mut localizer,
                    &config.gains,
                    &tol,
                    config.dt,
                    &mut rng,
                    |s| {
                        if record {
                            log.truth.push((s.time, s.true_pose));
                            log.estimate.push((s.time, s.estimated_pose));
                        }
                    },
                );
                state = end;
                time = state.time;
                outcomes.push(outcome(&seq.id, &wp.id, round, result, time));
                if result == Outcome::Arrived {
                    table.insert(AttainmentRecord::success(
                        &seq.id,
                        &wp.id,
                        round,
                        TASK_FRAME,
                        time,
                        state.true_pose,
                    ))?;
                    schedule.push(entry(&seq.id, &wp.id, round, time, time + protocol.pause_s));
                    time += protocol.pause_s;
                    state.time = time;
                } else {
                    table.insert(AttainmentRecord::failure(
                        &seq.id, &wp.id, round, TASK_FRAME, time,
                    ))?;
                    schedule.push(entry(&seq.id, &wp.id, round, time, time));
                    aborted = true;
                }
            }
            if aborted {
                restart = true;
            }
            if config.mode == Mode::WithMap && round == 0 {
                localizer.set_map_reuse(true);
            }
        }
        if config.record_trajectories {
            trajectories.push(log);
        }
    }

    Ok(SimOutput {
        table,
        references: References::from_scenario(scenario),
        outcomes,
        schedule,
        trajectories,
    })
}

fn entry(seq: &str, wp: &str, round: u32, t0: f64, t1: f64) -> ScheduleEntry {
    ScheduleEntry {
        sequence_id: seq.into(),
        waypoint_id: wp.into(),
        round,
        t_start: t0,
        t_end: t1,
    }
}

fn outcome(seq: &str, wp: &str, round: u32, outcome: Outcome, time: f64) -> WaypointOutcome {
    WaypointOutcome {
        sequence_id: seq.into(),
        waypoint_id: wp.into(),
        round,
        outcome,
        time,
    }
}
