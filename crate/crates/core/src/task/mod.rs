//! Benchmark description (scenario) and the records produced by running it.

mod grid;
mod scenario;
mod table;

pub use grid::OccupancyGrid;
pub use scenario::{
    load_scenario, Mode, Protocol, RobotProfile, Scenario, ScenarioError, Sequence, Waypoint,
    SMALL_HOUSE,
};
pub use table::{
    mark_attainment, AttainmentRecord, AttainmentTable, Cell, TableError, TABLE_HEADER,
};

/// Frame id used for poses expressed in the scenario (floor-plan) frame.
pub const TASK_FRAME: &str = "task";
