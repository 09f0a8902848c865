//! Planar and spatial pose algebra.
//!
//! Angles live in `(-pi, pi]`. Spatial rotations are unit quaternions with a
//! non-negative scalar part. Everything here is a pure function over values.

mod align;
mod angle;
pub(crate) mod eigen;
mod pose2;
mod pose3;
mod quaternion;

pub use align::align_trajectories;
pub use angle::{angle_distance, circular_mean, wrap_angle, Angle};
pub use pose2::Pose2;
pub use pose3::{project_se3_to_se2, Pose3, RigidTransform3, Vec3};
pub use quaternion::{rotation_distance, rotation_mean, Quaternion, UnitQuaternion};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("circular mean undefined: resultant length {resultant} below threshold")]
    DegenerateMean { resultant: f64 },
    #[error("yaw undefined: rotation maps the body x-axis onto the vertical")]
    DegenerateProjection,
    #[error("alignment failed: {0}")]
    Alignment(String),
}
