use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{RobotState, SimError};
use crate::geometry::Pose2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LocalizerKind {
    Perfect,
    DriftingOdometry,
    MapCorrected,
}

impl LocalizerKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            LocalizerKind::Perfect => "perfect",
            LocalizerKind::DriftingOdometry => "drifting_odometry",
            LocalizerKind::MapCorrected => "map_corrected",
        }
    }
}

/// Systematic map error, added to the true pose in the world frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum BiasField {
    None,
    Constant {
        x: f64,
        y: f64,
        theta: f64,
    },
    /// Random vectors on a square lattice, interpolated bilinearly. Each
    /// component of the translation is bounded by `magnitude`, the heading
    /// by `heading`.
    Hashed {
        magnitude: f64,
        heading: f64,
        cell_m: f64,
    },
}

/// Parameters of a localizer model.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LocalizerSpec {
    pub kind: LocalizerKind,
    /// Translational noise, m per sqrt(s), on each body axis.
    pub sigma_v: f64,
    /// Heading noise, rad per sqrt(s).
    pub sigma_omega: f64,
    /// Bound on the residual position error after correction.
    pub rho: f64,
    /// Bound on the residual heading error after correction.
    pub rho_heading: f64,
    pub bias: BiasField,
    /// Seed of the hashed bias field; the run seed when unset.
    pub bias_seed: Option<u64>,
    /// Chance per correction that the estimate is lost.
    pub p_fail: f64,
    pub map_reuse: bool,
}

impl Default for LocalizerSpec {
    fn default() -> Self {
        LocalizerSpec {
            kind: LocalizerKind::Perfect,
            sigma_v: 0.0,
            sigma_omega: 0.0,
            rho: 0.0,
            rho_heading: 0.0,
            bias: BiasField::None,
            bias_seed: None,
            p_fail: 0.0,
            map_reuse: false,
        }
    }
}

impl LocalizerSpec {
    pub fn perfect() -> Self {
        Self::default()
    }

    pub fn drifting_odometry(sigma_v: f64, sigma_omega: f64) -> Self {
        LocalizerSpec {
            kind: LocalizerKind::DriftingOdometry,
            sigma_v,
            sigma_omega,
            ..Self::default()
        }
    }

    /// Map-corrected model with the bundled defaults.
    pub fn map_corrected() -> Self {
        LocalizerSpec {
            kind: LocalizerKind::MapCorrected,
            sigma_v: 0.05,
            sigma_omega: 0.02,
            rho: 0.15,
            rho_heading: 0.04,
            bias: BiasField::Hashed {
                magnitude: 0.2,
                heading: 0.03,
                cell_m: 1.0,
            },
            bias_seed: None,
            p_fail: 2e-4,
            map_reuse: false,
        }
    }

    /// Preset by name: `perfect`, `drifting_odometry` or `map_corrected`.
    pub fn preset(name: &str) -> Option<Self> {
        match name {
            "perfect" => Some(Self::perfect()),
            "drifting_odometry" => Some(Self::drifting_odometry(0.02, 0.01)),
            "map_corrected" => Some(Self::map_corrected()),
            _ => None,
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        let check = |field: &str, value: f64, ok: bool| {
            if value.is_finite() && ok {
                Ok(())
            } else {
                Err(SimError::invalid(
                    format!("localizer.{field}"),
                    format!("out of range: {value}"),
                ))
            }
        };
        check("sigma_v", self.sigma_v, self.sigma_v >= 0.0)?;
        check("sigma_omega", self.sigma_omega, self.sigma_omega >= 0.0)?;
        check("rho", self.rho, self.rho >= 0.0)?;
        check("rho_heading", self.rho_heading, self.rho_heading >= 0.0)?;
        check("p_fail", self.p_fail, (0.0..=1.0).contains(&self.p_fail))?;
        match self.bias {
            BiasField::None => {}
            BiasField::Constant { x, y, theta } => {
                check("bias.x", x, true)?;
                check("bias.y", y, true)?;
                check("bias.theta", theta, true)?;
            }
            BiasField::Hashed {
                magnitude,
                heading,
                cell_m,
            } => {
                check("bias.magnitude", magnitude, magnitude >= 0.0)?;
                check("bias.heading", heading, heading >= 0.0)?;
                check("bias.cell_m", cell_m, cell_m > 0.0)?;
            }
        }
        Ok(())
    }
}

/// World-frame additive offset; headings add and wrap.
fn offset(p: &Pose2<f64>, d: &Pose2<f64>) -> Pose2<f64> {
    Pose2::new(p.x + d.x, p.y + d.y, p.heading() + d.heading())
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Uniform in [-1, 1] from a lattice corner and component index.
fn lattice_unit(seed: u64, ix: i64, iy: i64, component: u64) -> f64 {
    let h =
        mix(mix(mix(seed ^ component.wrapping_mul(0xa076_1d64_78bd_642f)) ^ ix as u64) ^ iy as u64);
    (h >> 11) as f64 / (1u64 << 52) as f64 - 1.0
}

impl BiasField {
    /// Bias `(dx, dy, dtheta)` at a world position.
    pub fn at(&self, seed: u64, x: f64, y: f64) -> Pose2<f64> {
        match *self {
            BiasField::None => Pose2::identity(),
            BiasField::Constant { x, y, theta } => Pose2::new(x, y, theta),
            BiasField::Hashed {
                magnitude,
                heading,
                cell_m,
            } => {
                let (gx, gy) = (x / cell_m, y / cell_m);
                let (ix, iy) = (gx.floor() as i64, gy.floor() as i64);
                let (fx, fy) = (gx - gx.floor(), gy - gy.floor());
                let sample = |c: u64| {
                    let v = |dx: i64, dy: i64| lattice_unit(seed, ix + dx, iy + dy, c);
                    let bottom = v(0, 0) * (1.0 - fx) + v(1, 0) * fx;
                    let top = v(0, 1) * (1.0 - fx) + v(1, 1) * fx;
                    bottom * (1.0 - fy) + top * fy
                };
                Pose2::new(
                    magnitude * sample(0),
                    magnitude * sample(1),
                    heading * sample(2),
                )
            }
        }
    }
}

/// Running state of one localizer instance.
#[derive(Debug, Clone)]
pub struct Localizer {
    spec: LocalizerSpec,
    bias_seed: u64,
    map_reuse: bool,
    last_true: Pose2<f64>,
    estimate: Pose2<f64>,
    residual: Pose2<f64>,
    diverged: bool,
}

impl Localizer {
    pub fn new(spec: LocalizerSpec, bias_seed: u64, start: Pose2<f64>) -> Self {
        let map_reuse = spec.map_reuse;
        let mut l = Localizer {
            spec,
            bias_seed,
            map_reuse,
            last_true: start,
            estimate: start,
            residual: Pose2::identity(),
            diverged: false,
        };
        l.reset(start);
        l
    }

    /// Re-initializes the estimate at a known pose. The map, if any, is kept.
    pub fn reset(&mut self, true_pose: Pose2<f64>) {
        self.last_true = true_pose;
        self.residual = Pose2::identity();
        self.diverged = false;
        self.estimate = match self.spec.kind {
            LocalizerKind::MapCorrected => self.corrected(&true_pose),
            _ => true_pose,
        };
    }

    /// Switches to the reduced error bounds of a localizer running on a
    /// previously built map.
    pub fn set_map_reuse(&mut self, on: bool) {
        self.map_reuse = on;
    }

    pub fn map_reuse(&self) -> bool {
        self.map_reuse
    }

    pub fn estimate(&self) -> Pose2<f64> {
        self.estimate
    }

    pub fn is_diverged(&self) -> bool {
        self.diverged
    }

    pub fn bias_at(&self, x: f64, y: f64) -> Pose2<f64> {
        self.spec.bias.at(self.bias_seed, x, y)
    }

    fn effective_bounds(&self) -> (f64, f64, f64) {
        if self.map_reuse {
            (
                self.spec.rho / 2.0,
                self.spec.rho_heading / 2.0,
                self.spec.p_fail / 4.0,
            )
        } else {
            (self.spec.rho, self.spec.rho_heading, self.spec.p_fail)
        }
    }

    fn corrected(&self, true_pose: &Pose2<f64>) -> Pose2<f64> {
        offset(
            &offset(true_pose, &self.bias_at(true_pose.x, true_pose.y)),
            &self.residual,
        )
    }

    fn noise<R: Rng>(&self, dt: f64, rng: &mut R) -> Pose2<f64> {
        let s = dt.sqrt();
        let mut n = || -> f64 { rng.sample(StandardNormal) };
        let (a, b, c) = (n(), n(), n());
        Pose2::new(
            self.spec.sigma_v * s * a,
            self.spec.sigma_v * s * b,
            self.spec.sigma_omega * s * c,
        )
    }

    /// Updates the estimate after the robot moved to `state.true_pose`.
    pub fn localize<R: Rng>(&mut self, state: &RobotState, dt: f64, rng: &mut R) -> Pose2<f64> {
        if self.diverged {
            return self.estimate;
        }
        let now = state.true_pose;
        match self.spec.kind {
            LocalizerKind::Perfect => self.estimate = now,
            LocalizerKind::DriftingOdometry => {
                let step = self.last_true.between(&now).compose(&self.noise(dt, rng));
                self.estimate = self.estimate.compose(&step);
            }
            LocalizerKind::MapCorrected => {
                let (rho, rho_h, p_fail) = self.effective_bounds();
                let r = offset(&self.residual, &self.noise(dt, rng));
                let norm = r.x.hypot(r.y);
                let scale = if norm > rho { rho / norm } else { 1.0 };
                let th = r.heading().clamp(-rho_h, rho_h);
                self.residual = Pose2::new(r.x * scale, r.y * scale, th);
                if p_fail > 0.0 && rng.random::<f64>() < p_fail {
                    self.diverged = true;
                    return self.estimate;
                }
                self.estimate = self.corrected(&now);
            }
        }
        self.last_true = now;
        self.estimate
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::step_kinematics;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn drive<F: FnMut(&RobotState)>(l: &mut Localizer, steps: usize, mut check: F) {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut s = RobotState::at(Pose2::new(0.5, -0.2, 0.1), 0.0);
        for k in 0..steps {
            s = step_kinematics(&s, 0.4, 0.3 * ((k as f64) * 0.01).sin(), 0.05);
            s.estimated_pose = l.localize(&s, 0.05, &mut rng);
            check(&s);
        }
    }

    #[test]
    fn perfect_is_exact() {
        let mut l = Localizer::new(LocalizerSpec::perfect(), 0, Pose2::new(0.5, -0.2, 0.1));
        drive(&mut l, 500, |s| assert_eq!(s.estimated_pose, s.true_pose));
    }

    #[test]
    fn noiseless_odometry_tracks_truth() {
        let start = Pose2::new(0.5, -0.2, 0.1);
        let mut l = Localizer::new(LocalizerSpec::drifting_odometry(0.0, 0.0), 0, start);
        drive(&mut l, 500, |s| {
            assert!(s.estimated_pose.distance(&s.true_pose) < 1e-9);
        });
    }

    #[test]
    fn noisy_odometry_drifts() {
        let start = Pose2::new(0.5, -0.2, 0.1);
        let mut l = Localizer::new(LocalizerSpec::drifting_odometry(0.05, 0.02), 0, start);
        let mut last = 0.0;
        drive(&mut l, 2000, |s| {
            last = s.estimated_pose.distance(&s.true_pose)
        });
        assert!(last > 1e-3);
    }

    #[test]
    fn constant_bias_without_residual() {
        let spec = LocalizerSpec {
            kind: LocalizerKind::MapCorrected,
            bias: BiasField::Constant {
                x: 0.1,
                y: -0.05,
                theta: 0.02,
            },
            ..LocalizerSpec::default()
        };
        let b = Pose2::new(0.1, -0.05, 0.02);
        let mut l = Localizer::new(spec, 0, Pose2::new(0.5, -0.2, 0.1));
        drive(&mut l, 300, |s| {
            let expected = offset(&s.true_pose, &b);
            assert!(s.estimated_pose.distance(&expected) < 1e-12);
            assert!((s.estimated_pose.heading() - expected.heading()).abs() < 1e-12);
        });
    }

    #[test]
    fn residual_stays_bounded() {
        let mut spec = LocalizerSpec::map_corrected();
        spec.bias = BiasField::None;
        spec.p_fail = 0.0;
        spec.sigma_v = 0.5;
        let mut l = Localizer::new(spec.clone(), 0, Pose2::new(0.5, -0.2, 0.1));
        drive(&mut l, 2000, |s| {
            assert!(s.estimated_pose.distance(&s.true_pose) <= spec.rho + 1e-12);
        });
        l.set_map_reuse(true);
        drive(&mut l, 2000, |s| {
            assert!(s.estimated_pose.distance(&s.true_pose) <= spec.rho / 2.0 + 1e-12);
        });
    }

    #[test]
    fn certain_failure_diverges() {
        let mut spec = LocalizerSpec::map_corrected();
        spec.p_fail = 1.0;
        let mut l = Localizer::new(spec, 0, Pose2::identity());
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let s = step_kinematics(&RobotState::at(Pose2::identity(), 0.0), 0.1, 0.0, 0.05);
        l.localize(&s, 0.05, &mut rng);
        assert!(l.is_diverged());
    }

    #[test]
    fn hashed_bias_is_bounded_and_continuous() {
        let field = BiasField::Hashed {
            magnitude: 0.2,
            heading: 0.03,
            cell_m: 1.0,
        };
        for i in 0..400 {
            let (x, y) = (i as f64 * 0.037 - 3.0, (i as f64 * 0.61).sin() * 4.0);
            let b = field.at(9, x, y);
            assert!(b.x.abs() <= 0.2 && b.y.abs() <= 0.2 && b.heading().abs() <= 0.03);
            let c = field.at(9, x + 1e-7, y);
            assert!(b.distance(&c) < 1e-5);
        }
        assert_eq!(field.at(9, 1.3, 2.7), field.at(9, 1.3, 2.7));
        assert_ne!(field.at(9, 1.3, 2.7), field.at(10, 1.3, 2.7));
    }

    #[test]
    fn spec_validation() {
        assert!(LocalizerSpec::map_corrected().validate().is_ok());
        let mut bad = LocalizerSpec::map_corrected();
        bad.p_fail = 1.5;
        assert!(bad.validate().is_err());
        let mut bad = LocalizerSpec::perfect();
        bad.sigma_v = -1.0;
        assert!(bad.validate().is_err());
        let spec: LocalizerSpec = toml::from_str(
            "kind = \"map_corrected\"\nrho = 0.1\n[bias]\nkind = \"constant\"\nx = 0.1\ny = 0.0\ntheta = 0.0\n",
        )
        .unwrap();
        assert_eq!(
            spec.bias,
            BiasField::Constant {
                x: 0.1,
                y: 0.0,
                theta: 0.0
            }
        );
        assert!(toml::from_str::<LocalizerSpec>("sigma = 1.0").is_err());
    }
}
