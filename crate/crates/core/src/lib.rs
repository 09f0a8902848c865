//! Task-driven navigation benchmarking.
//!
//! A robot visits the waypoints of a scenario over several rounds. The poses
//! it stops at are scored for precision (how well stops repeat), accuracy
//! (how far they are from the waypoint, when a reference exists) and
//! completeness (how many waypoints were reached in every round).
//!
//! - [`geometry`]: planar and spatial poses, angles, rotations, alignment.
//! - [`task`]: scenarios and the attainment table.
//! - [`metrics`]: waypoint metrics, curves, frame-wise trajectory metrics, reports.
//! - [`ingest`]: tag-detection logs to attainment tables.
//! - [`sim`]: closed-loop simulator with modeled localizers.
//!
//! Geometry and metrics are generic over [`scalar::Real`] (`f32` or `f64`);
//! the aliases below fix the scalar.

// `!(a < b)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod geometry;
pub mod ingest;
pub mod metrics;
pub mod scalar;
pub mod sim;
pub mod task;

pub use scalar::Real;

pub type AngleF64 = geometry::Angle<f64>;
pub type AngleF32 = geometry::Angle<f32>;
pub type Pose2F64 = geometry::Pose2<f64>;
pub type Pose2F32 = geometry::Pose2<f32>;
pub type Pose3F64 = geometry::Pose3<f64>;
pub type Pose3F32 = geometry::Pose3<f32>;
pub type Vec3F64 = geometry::Vec3<f64>;
pub type Vec3F32 = geometry::Vec3<f32>;
pub type UnitQuaternionF64 = geometry::UnitQuaternion<f64>;
pub type UnitQuaternionF32 = geometry::UnitQuaternion<f32>;
pub type RigidTransform3F64 = geometry::RigidTransform3<f64>;
pub type RigidTransform3F32 = geometry::RigidTransform3<f32>;
pub type TrajectoryF64 = metrics::Trajectory<f64>;
pub type TrajectoryF32 = metrics::Trajectory<f32>;
pub type FramewiseReportF64 = metrics::FramewiseReport<f64>;
pub type FramewiseReportF32 = metrics::FramewiseReport<f32>;
