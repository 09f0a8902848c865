use crate::geometry::Pose2;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RobotState {
    pub true_pose: Pose2<f64>,
    pub estimated_pose: Pose2<f64>,
    /// Simulated seconds.
    pub time: f64,
}

impl RobotState {
    pub fn at(pose: Pose2<f64>, time: f64) -> Self {
        RobotState {
            true_pose: pose,
            estimated_pose: pose,
            time,
        }
    }
}

/// Unicycle update of the true pose; the estimate is left to the localizer.
///
/// Integrates along the exact circular arc when the turn per step is not
/// negligible, and with a straight Euler step otherwise.
pub fn step_kinematics(state: &RobotState, v: f64, omega: f64, dt: f64) -> RobotState {
    let p = state.true_pose;
    let th = p.heading();
    let dth = omega * dt;
    let (x, y) = if dth.abs() > 1e-6 {
        let r = v / omega;
        (
            p.x + r * ((th + dth).sin() - th.sin()),
            p.y - r * ((th + dth).cos() - th.cos()),
        )
    } else {
        (p.x + v * th.cos() * dt, p.y + v * th.sin() * dt)
    };
    RobotState {
        true_pose: Pose2::new(x, y, th + dth),
        estimated_pose: state.estimated_pose,
        time: state.time + dt,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn standing_still() {
        let s = RobotState::at(Pose2::new(1.0, 2.0, 0.3), 0.0);
        let n = step_kinematics(&s, 0.0, 0.0, 0.1);
        assert_eq!(n.true_pose, s.true_pose);
        assert_eq!(n.time, 0.1);
    }

    #[test]
    fn straight_line() {
        let n = step_kinematics(&RobotState::at(Pose2::identity(), 0.0), 1.0, 0.0, 1.0);
        assert_eq!((n.true_pose.x, n.true_pose.y), (1.0, 0.0));
    }

    #[test]
    fn quarter_arc() {
        // radius 2/pi: a quarter turn ends at (r, r) heading pi/2
        let n = step_kinematics(&RobotState::at(Pose2::identity(), 0.0), 1.0, FRAC_PI_2, 1.0);
        let r = 2.0 / PI;
        assert!((n.true_pose.x - r).abs() < 1e-9);
        assert!((n.true_pose.y - r).abs() < 1e-9);
        assert!((n.true_pose.heading() - FRAC_PI_2).abs() < 1e-9);
    }

    #[test]
    fn many_small_steps_follow_the_arc() {
        let mut s = RobotState::at(Pose2::identity(), 0.0);
        for _ in 0..1000 {
            s = step_kinematics(&s, 1.0, FRAC_PI_2, 1e-3);
        }
        let r = 2.0 / PI;
        assert!((s.true_pose.x - r).abs() < 1e-9 && (s.true_pose.y - r).abs() < 1e-9);
    }
}
