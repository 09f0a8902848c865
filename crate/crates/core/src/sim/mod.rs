//! Closed-loop planar navigation with a modeled localizer.
//!
//! The robot steers on its *estimated* pose while the table records its
//! *true* pose, so localization error turns into where the robot stops.

mod controller;
mod kinematics;
mod localizer;
mod run;

pub use controller::{control, goto_waypoint, Arrival, ControllerGains, Outcome};
pub use kinematics::{step_kinematics, RobotState};
pub use localizer::{BiasField, Localizer, LocalizerKind, LocalizerSpec};
pub use run::{
    format_pose_rows, run_benchmark, SimOutput, SimRunConfig, TrajectoryLog, WaypointOutcome,
};

use thiserror::Error;

use crate::task::TableError;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("invalid simulation setting `{field}`: {message}")]
    InvalidConfig { field: String, message: String },
    #[error(transparent)]
    Table(#[from] TableError),
}

impl SimError {
    pub(crate) fn invalid(field: impl Into<String>, message: impl Into<String>) -> Self {
        SimError::InvalidConfig {
            field: field.into(),
            message: message.into(),
        }
    }
}
