//! Run configuration. JSON with an explicit schema version; unknown fields are
//! rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use nalgebra::{Matrix3, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::controller::{ControlGains, ControlMode, Controller, VelocityProfile};
use crate::dq::{DualVector, Quaternion, Tolerances};
use crate::reference::{
    build_spline_reference, load_spline_samples, GeometricReference, Helix3d, Sinusoid2d,
    StraightLine,
};
use crate::rigid_body::{BodyParams, RigidBodyState};
use crate::{Error, Result};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BodyConfig {
    pub mass: f64,
    /// Row-major inertia matrix.
    pub inertia: [[f64; 3]; 3],
}

impl Default for BodyConfig {
    fn default() -> Self {
        Self {
            mass: 1.0,
            inertia: [[0.01, 0.0, 0.0], [0.0, 0.01, 0.0], [0.0, 0.0, 0.01]],
        }
    }
}

impl BodyConfig {
    pub fn params(&self) -> Result<BodyParams> {
        let i = &self.inertia;
        BodyParams::new(
            self.mass,
            Matrix3::new(
                i[0][0], i[0][1], i[0][2], i[1][0], i[1][1], i[1][2], i[2][0], i[2][1], i[2][2],
            ),
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GainConfig {
    /// `[real; dual]`
    pub kp: [f64; 6],
    pub kv: [f64; 6],
    pub k_theta: f64,
}

impl Default for GainConfig {
    fn default() -> Self {
        Self {
            kp: [3.0; 6],
            kv: [3.0; 6],
            k_theta: 1.0,
        }
    }
}

impl GainConfig {
    pub fn gains(&self) -> Result<ControlGains> {
        ControlGains::new(
            DualVector::from_array(self.kp),
            DualVector::from_array(self.kv),
            self.k_theta,
        )
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ReferenceConfig {
    StraightLine {
        theta_f: f64,
    },
    Helix3d,
    Sinusoid2d,
    /// Sample file; relative paths resolve against the config file's
    /// directory when loaded through [`SimConfig::load`].
    Spline {
        path: PathBuf,
    },
}

impl ReferenceConfig {
    pub fn build(&self) -> Result<Arc<dyn GeometricReference>> {
        Ok(match self {
            Self::StraightLine { theta_f } => {
                if !(*theta_f > 0.0) {
                    return Err(Error::ConfigInvalid("straight line needs theta_f > 0".into()));
                }
                Arc::new(StraightLine::new(0.0, *theta_f))
            }
            Self::Helix3d => Arc::new(Helix3d::default()),
            Self::Sinusoid2d => Arc::new(Sinusoid2d::default()),
            Self::Spline { path } => {
                let samples = load_spline_samples(path)?;
                Arc::new(build_spline_reference(&samples)?)
            }
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModeConfig {
    Following { profile: VelocityProfile },
    /// `θ̇ ≡ rate`; the initial `theta_dot` is ignored.
    Tracking { rate: f64 },
}

impl ModeConfig {
    pub fn mode(&self) -> Result<ControlMode> {
        match *self {
            Self::Following { profile } => {
                profile.validate()?;
                Ok(ControlMode::Following { profile })
            }
            Self::Tracking { rate } if rate > 0.0 && rate.is_finite() => {
                Ok(ControlMode::Tracking { rate })
            }
            Self::Tracking { rate } => Err(Error::ConfigInvalid(format!(
                "tracking rate must be positive, got {rate}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum InitialPose {
    /// Body placed at the given pose with the given velocities.
    Explicit {
        position: [f64; 3],
        /// `[w, x, y, z]`, normalized on load
        attitude: [f64; 4],
        #[serde(default)]
        velocity: [f64; 3],
        #[serde(default)]
        angular_velocity: [f64; 3],
    },
    /// Body on `q̂_d(θ₀)`; with `matched_twist` its twist equals `θ̇₀ ω̂_d`.
    OnReference {
        #[serde(default)]
        matched_twist: bool,
    },
    /// At rest at a pose drawn from `seed`: position uniform in a ball
    /// around `p_d(θ₀)`, rotation with uniform axis and angle in
    /// `[0, max_angle]` relative to `q_d(θ₀)`.
    Random {
        position_radius: f64,
        max_angle: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Trigger {
    Theta(f64),
    Time(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Disturbance {
    pub trigger: Trigger,
    /// Added to `ṗ`.
    pub delta_v: [f64; 3],
    /// Added to `ω`.
    pub delta_w: [f64; 3],
}

impl Disturbance {
    pub fn is_triggered(&self, t: f64, theta: f64) -> bool {
        match self.trigger {
            Trigger::Theta(x) => theta >= x,
            Trigger::Time(x) => t >= x,
        }
    }

    /// `ṗ += Δṗ`, `ω += Δω`.
    pub fn apply(&self, state: &RigidBodyState) -> RigidBodyState {
        let mut out = *state;
        out.v += Vector3::from(self.delta_v);
        out.w += Vector3::from(self.delta_w);
        out
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConvergenceConfig {
    /// Threshold on `‖ln q̂_e‖`.
    pub tolerance: f64,
    /// Time the threshold must hold, in seconds.
    pub hold: f64,
}

impl Default for ConvergenceConfig {
    fn default() -> Self {
        Self {
            tolerance: 1e-3,
            hold: 1.0,
        }
    }
}

fn default_true() -> bool {
    true
}

fn default_dt() -> f64 {
    1e-3
}

fn default_export_rate() -> f64 {
    100.0
}

fn default_theta_ddot_limit() -> f64 {
    crate::controller::DEFAULT_THETA_DDOT_LIMIT
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimConfig {
    pub schema_version: u32,
    pub name: String,
    #[serde(default)]
    pub body: BodyConfig,
    #[serde(default)]
    pub gains: GainConfig,
    pub reference: ReferenceConfig,
    pub mode: ModeConfig,
    pub initial: InitialPose,
    /// Defaults to the start of the reference range.
    #[serde(default)]
    pub theta0: Option<f64>,
    #[serde(default)]
    pub theta_dot0: f64,
    #[serde(default)]
    pub disturbance: Option<Disturbance>,
    #[serde(default = "default_true")]
    pub lambda_enabled: bool,
    #[serde(default = "default_theta_ddot_limit")]
    pub theta_ddot_limit: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
    /// Rows per second in the exported record; `1 / (dt · export_rate)` must
    /// be an integer.
    #[serde(default = "default_export_rate")]
    pub export_rate: f64,
    /// Upper bound on simulated time.
    pub duration: f64,
    /// Stop once `θ` has reached `θ_f` and this many further seconds have
    /// elapsed.
    #[serde(default)]
    pub stop_after_completion: Option<f64>,
    #[serde(default)]
    pub convergence: ConvergenceConfig,
    /// Used only for random initial poses.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub tolerances: Tolerances,
}

/// Everything a run needs, built and validated from a [`SimConfig`].
#[derive(Debug, Clone)]
pub struct Scenario {
    pub reference: Arc<dyn GeometricReference>,
    pub params: BodyParams,
    pub controller: Controller,
    pub initial: crate::sim::AugmentedState,
    pub steps_per_export: usize,
    pub total_steps: usize,
}

impl SimConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.check_schema()?;
        Ok(cfg)
    }

    /// Read a config file, resolving a relative spline path against the
    /// file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut cfg = Self::from_json(&std::fs::read_to_string(path)?)?;
        if let ReferenceConfig::Spline { path: spline } = &mut cfg.reference {
            if spline.is_relative() {
                if let Some(dir) = path.parent() {
                    *spline = dir.join(&*spline);
                }
            }
        }
        Ok(cfg)
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// SHA-256 of the compact JSON serialization.
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config serializes");
        hex::encode(Sha256::digest(text.as_bytes()))
    }

    fn check_schema(&self) -> Result<()> {
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(Error::ConfigInvalid(format!(
                "schema_version {} is not supported (expected {CONFIG_SCHEMA_VERSION})",
                self.schema_version
            )));
        }
        Ok(())
    }

    fn export_stride(&self) -> Result<usize> {
        let ratio = 1.0 / (self.dt * self.export_rate);
        let n = ratio.round();
        if !(n >= 1.0 && (ratio - n).abs() < 1e-9 * n.max(1.0)) {
            return Err(Error::ConfigInvalid(format!(
                "export interval 1/{} is not a multiple of dt = {}",
                self.export_rate, self.dt
            )));
        }
        Ok(n as usize)
    }

    /// Validate every field and build the run inputs.
    pub fn scenario(&self) -> Result<Scenario> {
        self.check_schema()?;
        let invalid = |msg: String| Err(Error::ConfigInvalid(msg));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return invalid(format!("dt must be positive, got {}", self.dt));
        }
        if !(self.export_rate > 0.0 && self.export_rate.is_finite()) {
            return invalid(format!("export_rate must be positive, got {}", self.export_rate));
        }
        if !(self.duration > 0.0 && self.duration.is_finite()) {
            return invalid(format!("duration must be positive, got {}", self.duration));
        }
        if !(self.theta_ddot_limit > 0.0) {
            return invalid("theta_ddot_limit must be positive".into());
        }
        if !(self.convergence.tolerance > 0.0 && self.convergence.hold >= 0.0) {
            return invalid("convergence tolerance must be positive and hold non-negative".into());
        }
        if matches!(self.stop_after_completion, Some(s) if !(s >= 0.0)) {
            return invalid("stop_after_completion must be non-negative".into());
        }
        let steps_per_export = self.export_stride()?;
        let total_steps = (self.duration / self.dt).round() as usize;

        let params = self.body.params()?;
        let gains = self.gains.gains()?;
        let mode = self.mode.mode()?;
        let reference = self.reference.build()?;
        let (lo, hi) = reference.theta_range();
        let theta0 = self.theta0.unwrap_or(lo);
        if !(theta0 >= lo && theta0 < hi) {
            return Err(Error::ThetaOutOfRange {
                theta: theta0,
                min: lo,
                max: hi,
            });
        }
        let theta_dot0 = match mode {
            ControlMode::Tracking { rate } => rate,
            ControlMode::Following { .. } => self.theta_dot0,
        };
        if !(theta_dot0 >= 0.0) {
            return invalid(format!("initial theta_dot must be non-negative, got {theta_dot0}"));
        }
        if let Some(d) = &self.disturbance {
            let finite = d.delta_v.iter().chain(&d.delta_w).all(|x| x.is_finite());
            if !finite {
                return invalid("disturbance components must be finite".into());
            }
        }

        let body = self.initial_body(reference.as_ref(), theta0, theta_dot0)?;
        let mut controller = Controller::new(gains, mode);
        controller.lambda_enabled = self.lambda_enabled;
        controller.theta_ddot_limit = self.theta_ddot_limit;
        Ok(Scenario {
            reference,
            params,
            controller,
            initial: crate::sim::AugmentedState::new(body, theta0, theta_dot0),
            steps_per_export,
            total_steps,
        })
    }

    fn initial_body(
        &self,
        reference: &dyn GeometricReference,
        theta0: f64,
        theta_dot0: f64,
    ) -> Result<RigidBodyState> {
        let start = reference.sample(theta0);
        match self.initial {
            InitialPose::Explicit {
                position,
                attitude,
                velocity,
                angular_velocity,
            } => {
                let q = Quaternion::from_array(attitude);
                let n = q.norm();
                if !(n > 0.0 && n.is_finite()) {
                    return Err(Error::ConfigInvalid("initial attitude must be non-zero".into()));
                }
                Ok(RigidBodyState {
                    p: Vector3::from(position),
                    v: Vector3::from(velocity),
                    q: q.scale(1.0 / n),
                    w: Vector3::from(angular_velocity),
                })
            }
            InitialPose::OnReference { matched_twist } => {
                let mut body = RigidBodyState::at_rest(start.position, start.attitude);
                if matched_twist {
                    body.v = start.velocity * theta_dot0;
                    body.w = start.angular_velocity * theta_dot0;
                }
                Ok(body)
            }
            InitialPose::Random {
                position_radius,
                max_angle,
            } => {
                if !(position_radius >= 0.0 && (0.0..=std::f64::consts::TAU).contains(&max_angle)) {
                    return Err(Error::ConfigInvalid(
                        "random pose needs position_radius >= 0 and max_angle in [0, 2π]".into(),
                    ));
                }
                let (offset, rotation) = random_offset(self.seed, position_radius, max_angle);
                Ok(RigidBodyState::at_rest(
                    start.position + offset,
                    (rotation * start.attitude).normalized(),
                ))
            }
        }
    }
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
            rng.gen_range(-1.0..=1.0),
        );
        let n = v.norm();
        if n > 1e-6 && n <= 1.0 {
            return v / n;
        }
    }
}

fn random_offset(seed: u64, radius: f64, max_angle: f64) -> (Vector3<f64>, Quaternion) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let r = radius * rng.gen::<f64>().cbrt();
    let offset = random_unit(&mut rng) * r;
    let angle = max_angle * rng.gen::<f64>();
    let axis = random_unit(&mut rng);
    (offset, Quaternion::from_axis_angle(axis, angle))
}
