use std::f64::consts::FRAC_PI_4;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{step_kinematics, Localizer, RobotState, SimError};
use crate::geometry::{angle_distance, Angle, Pose2};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControllerGains {
    pub k_rho: f64,
    pub k_alpha: f64,
    pub k_theta: f64,
    /// m/s
    pub v_max: f64,
    /// rad/s
    pub omega_max: f64,
}

impl Default for ControllerGains {
    fn default() -> Self {
        ControllerGains {
            k_rho: 0.8,
            k_alpha: 1.5,
            k_theta: 1.0,
            v_max: 0.5,
            omega_max: 1.5,
        }
    }
}

impl ControllerGains {
    pub fn validate(&self) -> Result<(), SimError> {
        for (field, v) in [
            ("k_rho", self.k_rho),
            ("k_alpha", self.k_alpha),
            ("k_theta", self.k_theta),
            ("v_max", self.v_max),
            ("omega_max", self.omega_max),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(SimError::invalid(
                    format!("gains.{field}"),
                    format!("must be > 0, got {v}"),
                ));
            }
        }
        Ok(())
    }
}

/// Arrival tolerances and time budget for one waypoint.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Arrival {
    pub pos_tol: f64,
    pub ang_tol: f64,
    pub timeout_s: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Arrived,
    Timeout,
    Diverged,
    /// Not attempted because an earlier waypoint of the round failed.
    Skipped,
}

impl Outcome {
    pub fn as_str(&self) -> &'static str {
        match self {
            Outcome::Arrived => "arrived",
            Outcome::Timeout => "timeout",
            Outcome::Diverged => "diverged",
            Outcome::Skipped => "skipped",
        }
    }
}

fn arrived(est: &Pose2<f64>, target: &Pose2<f64>, tol: &Arrival) -> bool {
    est.distance(target) < tol.pos_tol && angle_distance(est.theta, target.theta) < tol.ang_tol
}

/// Rotate-drive-rotate law on the estimated pose. Returns `(v, omega)`.
///
/// Far from the goal the robot turns toward it and drives; inside the
/// position tolerance it turns to the goal heading. Small position errors
/// close to the goal may be corrected by reversing.
pub fn control(
    est: &Pose2<f64>,
    target: &Pose2<f64>,
    gains: &ControllerGains,
    tol: &Arrival,
) -> (f64, f64) {
    let (dx, dy) = (target.x - est.x, target.y - est.y);
    let dist = dx.hypot(dy);
    let (v, omega) = if dist >= tol.pos_tol {
        let alpha = Angle::wrap(dy.atan2(dx) - est.heading()).radians();
        let (alpha, sign) = if dist < 3.0 * tol.pos_tol && alpha.abs() > std::f64::consts::FRAC_PI_2
        {
            (Angle::wrap(alpha + std::f64::consts::PI).radians(), -1.0)
        } else {
            (alpha, 1.0)
        };
        let v = if alpha.abs() > FRAC_PI_4 {
            0.0
        } else {
            sign * gains.k_rho * dist * alpha.cos()
        };
        (v, gains.k_alpha * alpha)
    } else {
        let err = Angle::wrap(target.heading() - est.heading()).radians();
        (0.0, gains.k_theta * err)
    };
    (
        v.clamp(-gains.v_max, gains.v_max),
        omega.clamp(-gains.omega_max, gains.omega_max),
    )
}

/// Drives toward `target` until the estimate is within tolerance, the
/// localizer diverges, or the time budget runs out.
///
/// `on_step` sees every intermediate state, including the final one.
#[allow(clippy::too_many_arguments)]
pub fn goto_waypoint<R: Rng>(
    state: RobotState,
    target: &Pose2<f64>,
    localizer: &mut Localizer,
    gains: &ControllerGains,
    tol: &Arrival,
    dt: f64,
    rng: &mut R,
    mut on_step: impl FnMut(&RobotState),
) -> (Outcome, RobotState) {
    let t0 = state.time;
    let max_steps = (tol.timeout_s / dt).ceil() as u64;
    let mut s = state;
    s.estimated_pose = localizer.estimate();
    if localizer.is_diverged() {
        return (Outcome::Diverged, s);
    }
    for k in 1..=max_steps {
        if arrived(&s.estimated_pose, target, tol) {
            return (Outcome::Arrived, s);
        }
        let (v, omega) = control(&s.estimated_pose, target, gains, tol);
        s = step_kinematics(&s, v, omega, dt);
        s.time = t0 + k as f64 * dt;
        s.estimated_pose = localizer.localize(&s, dt, rng);
        on_step(&s);
        if localizer.is_diverged() {
            return (Outcome::Diverged, s);
        }
    }
    if arrived(&s.estimated_pose, target, tol) {
        return (Outcome::Arrived, s);
    }
    (Outcome::Timeout, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::{BiasField, LocalizerKind, LocalizerSpec};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    const TOL: Arrival = Arrival {
        pos_tol: 0.05,
        ang_tol: 0.05,
        timeout_s: 120.0,
    };

    fn run(spec: LocalizerSpec, target: Pose2<f64>) -> (Outcome, RobotState) {
        let start = Pose2::identity();
        let mut l = Localizer::new(spec, 1, start);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        goto_waypoint(
            RobotState::at(start, 0.0),
            &target,
            &mut l,
            &ControllerGains::default(),
            &TOL,
            0.05,
            &mut rng,
            |_| {},
        )
    }

    #[test]
    fn perfect_reaches_goal_ahead() {
        let target = Pose2::new(1.0, 0.0, 0.0);
        let (o, s) = run(LocalizerSpec::perfect(), target);
        assert_eq!(o, Outcome::Arrived);
        assert!(s.true_pose.distance(&target) < TOL.pos_tol);
        assert!(s.time < 20.0);
    }

    #[test]
    fn perfect_reaches_goal_behind_with_turn() {
        let target = Pose2::new(-1.5, 2.0, -2.5);
        let (o, s) = run(LocalizerSpec::perfect(), target);
        assert_eq!(o, Outcome::Arrived);
        assert!(s.true_pose.distance(&target) < TOL.pos_tol);
        let dh = Angle::wrap(s.true_pose.heading() - target.heading()).radians();
        assert!(dh.abs() < TOL.ang_tol);
    }

    #[test]
    fn constant_bias_shifts_the_stop() {
        let spec = LocalizerSpec {
            kind: LocalizerKind::MapCorrected,
            bias: BiasField::Constant {
                x: 0.2,
                y: -0.1,
                theta: 0.0,
            },
            ..LocalizerSpec::default()
        };
        let target = Pose2::new(2.0, 1.0, 0.5);
        let (o, s) = run(spec, target);
        assert_eq!(o, Outcome::Arrived);
        let expected = Pose2::new(target.x - 0.2, target.y + 0.1, target.heading());
        assert!(s.true_pose.distance(&expected) < TOL.pos_tol);
        let err = s.true_pose.distance(&target);
        assert!((err - 0.2f64.hypot(0.1)).abs() < TOL.pos_tol);
    }

    #[test]
    fn divergence_fails_the_waypoint() {
        let mut spec = LocalizerSpec::map_corrected();
        spec.p_fail = 1.0;
        let (o, _) = run(spec, Pose2::new(1.0, 0.0, 0.0));
        assert!(matches!(o, Outcome::Diverged | Outcome::Timeout));
    }

    #[test]
    fn timeout_when_budget_too_short() {
        let start = Pose2::identity();
        let mut l = Localizer::new(LocalizerSpec::perfect(), 0, start);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let tol = Arrival {
            timeout_s: 1.0,
            ..TOL
        };
        let (o, s) = goto_waypoint(
            RobotState::at(start, 0.0),
            &Pose2::new(5.0, 0.0, 0.0),
            &mut l,
            &ControllerGains::default(),
            &tol,
            0.05,
            &mut rng,
            |_| {},
        );
        assert_eq!(o, Outcome::Timeout);
        assert!((s.time - 1.0).abs() < 1e-9);
    }
}
