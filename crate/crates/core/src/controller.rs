//! Pose-following control law.
//!
//! `Û = Û_FF + Û_FB` where the feedforward removes every state- and
//! reference-dependent term from the twist-error dynamics and the feedback is
//! a PD law on the dual quaternion logarithm. The pose-parameter acceleration
//! `θ̈` is the virtual input and is chosen by one of the pose-parameter laws
//! below; tracking mode instead advances `θ` as a clock.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::dq::{DualQuaternion, DualTwist, DualVector};
use crate::error_dynamics::ErrorState;
use crate::reference::{DesiredDualState, GeometricReference};
use crate::rigid_body::{drift_term, wrench_from_control, BodyParams, Wrench};
use crate::sim::AugmentedState;
use crate::{Error, Result};

/// Default bound on `|θ̈|`.
pub const DEFAULT_THETA_DDOT_LIMIT: f64 = 10.0;

/// PD gains and the pose-parameter gain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlGains {
    kp: DualVector,
    kv: DualVector,
    k_theta: f64,
}

impl ControlGains {
    /// All gains must be positive and the dual part of `kp` must be a single
    /// repeated value.
    pub fn new(kp: DualVector, kv: DualVector, k_theta: f64) -> Result<Self> {
        let positive = |v: &DualVector| v.to_array().iter().all(|&c| c.is_finite() && c > 0.0);
        if !positive(&kp) {
            return Err(Error::InvalidGains("kp components must be positive".into()));
        }
        if !positive(&kv) {
            return Err(Error::InvalidGains("kv components must be positive".into()));
        }
        if !(kp.dual.x == kp.dual.y && kp.dual.y == kp.dual.z) {
            return Err(Error::InvalidGains(
                "dual part of kp must have equal components".into(),
            ));
        }
        if !(k_theta.is_finite() && k_theta > 0.0) {
            return Err(Error::InvalidGains("k_theta must be positive".into()));
        }
        Ok(Self { kp, kv, k_theta })
    }

    /// `kp = kv = k·(1,1,1) + ε k·(1,1,1)`.
    pub fn uniform(k: f64, k_theta: f64) -> Result<Self> {
        Self::new(DualVector::uniform(k, k), DualVector::uniform(k, k), k_theta)
    }

    pub fn kp(&self) -> &DualVector {
        &self.kp
    }

    pub fn kv(&self) -> &DualVector {
        &self.kv
    }

    pub fn k_theta(&self) -> f64 {
        self.k_theta
    }
}

/// Saturating map from transverse distance to desired pose-parameter speed:
/// `v(d) = v_min + (v_nom − v_min)·exp(−(d/d_scale)²)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DistanceMap {
    pub v_min: f64,
    pub v_nom: f64,
    pub d_scale: f64,
}

/// Named distance maps, from most to least aggressive.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DistancePreset {
    Progressive,
    Medium,
    Conservative,
}

impl DistancePreset {
    pub const ALL: [DistancePreset; 3] = [Self::Progressive, Self::Medium, Self::Conservative];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Progressive => "progressive",
            Self::Medium => "medium",
            Self::Conservative => "conservative",
        }
    }
}

impl DistanceMap {
    pub fn preset(preset: DistancePreset, v_nom: f64) -> Self {
        let (floor, d_scale) = match preset {
            DistancePreset::Progressive => (0.5, 0.1),
            DistancePreset::Medium => (0.25, 0.1),
            DistancePreset::Conservative => (0.1, 0.05),
        };
        Self {
            v_min: floor * v_nom,
            v_nom,
            d_scale,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_min > 0.0 && self.v_nom >= self.v_min && self.d_scale > 0.0) {
            return Err(Error::InvalidProfile(format!(
                "distance map needs 0 < v_min <= v_nom and d_scale > 0, got {self:?}"
            )));
        }
        Ok(())
    }

    pub fn speed(&self, distance: f64) -> f64 {
        let x = distance / self.d_scale;
        self.v_min + (self.v_nom - self.v_min) * (-x * x).exp()
    }
}

/// Desired pose-parameter speed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum VelocityProfile {
    /// `θ_vd(θ) = value`
    Constant { value: f64 },
    /// `θ_vd(θ) = mean + amplitude·sin(2π·frequency·θ)`
    Sinusoidal {
        mean: f64,
        amplitude: f64,
        frequency: f64,
    },
    /// `θ_vd = map(d_e⊥)`
    Distance(DistanceMap),
}

impl VelocityProfile {
    pub fn validate(&self) -> Result<()> {
        match self {
            Self::Constant { value } if *value > 0.0 => Ok(()),
            Self::Sinusoidal {
                mean,
                amplitude,
                frequency,
            } if *mean > amplitude.abs() && frequency.is_finite() => Ok(()),
            Self::Distance(map) => map.validate(),
            other => Err(Error::InvalidProfile(format!(
                "profile must stay strictly positive: {other:?}"
            ))),
        }
    }

    /// `θ_vd` and `θ̊_vd` at `θ` for θ-dependent profiles; `None` for the
    /// distance map.
    pub fn target(&self, theta: f64) -> Option<(f64, f64)> {
        match *self {
            Self::Constant { value } => Some((value, 0.0)),
            Self::Sinusoidal {
                mean,
                amplitude,
                frequency,
            } => {
                let w = 2.0 * std::f64::consts::PI * frequency;
                let (s, c) = (w * theta).sin_cos();
                Some((mean + amplitude * s, amplitude * w * c))
            }
            Self::Distance(_) => None,
        }
    }

    /// Desired speed given `θ` and the transverse distance.
    pub fn desired_speed(&self, theta: f64, distance: f64) -> f64 {
        match self {
            Self::Distance(map) => map.speed(distance),
            _ => self.target(theta).map(|(v, _)| v).unwrap_or(0.0),
        }
    }
}

/// `+1` if the scalar of the real part is `>= 0`, else `−1`.
pub fn lambda_switch(pose_error: &DualQuaternion) -> f64 {
    if pose_error.real.w >= 0.0 {
        1.0
    } else {
        -1.0
    }
}

/// `Û_FB = −2 k_p ⊙ ln(λ q̂_e) − k_v ⊙ ω̂_e` with `λ` from [`lambda_switch`].
pub fn feedback(pose_error: &DualQuaternion, twist_error: &DualTwist, gains: &ControlGains) -> DualTwist {
    feedback_with_lambda(pose_error, twist_error, gains, lambda_switch(pose_error))
}

/// Feedback with an explicit `λ` (use `1.0` to disable the switch).
pub fn feedback_with_lambda(
    pose_error: &DualQuaternion,
    twist_error: &DualTwist,
    gains: &ControlGains,
    lambda: f64,
) -> DualTwist {
    let log = pose_error.scale(lambda).log();
    -(gains.kp.gain_apply(&log) * 2.0) - gains.kv.gain_apply(twist_error)
}

/// `Û_FF = −F̂ − θ̈ Ad_{q̂_e} ω̂_d* − θ̇[q̂̇_e ∘ ω̂_d* ∘ q̂_e* + θ̇ q̂_e ∘ ω̂̊_d* ∘ q̂_e*
/// + q̂_e ∘ ω̂_d* ∘ q̂̇_e*]`.
pub fn feedforward(
    state: &AugmentedState,
    desired: &DesiredDualState,
    params: &BodyParams,
    theta_ddot: f64,
) -> DualTwist {
    let err = ErrorState::compute(state, desired);
    feedforward_from_error(state, desired, params, &err, theta_ddot)
}

fn feedforward_from_error(
    state: &AugmentedState,
    desired: &DesiredDualState,
    params: &BodyParams,
    err: &ErrorState,
    theta_ddot: f64,
) -> DualTwist {
    let q_e = err.pose;
    let q_e_conj = q_e.conj();
    let wd = desired.twist.conj().to_dual_quaternion();
    let wd_rate = desired.twist_rate.conj().to_dual_quaternion();
    let q_e_dot = (err.twist.to_dual_quaternion() * q_e).scale(0.5);

    let transported = DualVector::from_dual_quaternion(&(q_e * wd * q_e_conj));
    let rate_terms = q_e_dot * wd * q_e_conj
        + q_e * wd_rate * q_e_conj * DualQuaternion::identity().scale(state.theta_dot)
        + q_e * wd * q_e_dot.conj();
    let rate_terms = DualVector::from_dual_quaternion(&rate_terms);

    -drift_term(&state.body, params) - transported * theta_ddot - rate_terms * state.theta_dot
}

/// Velocity-assignment law: `θ̈ = −k_θ(θ̇ − θ_vd(θ)) + θ̇ θ̊_vd(θ)`.
///
/// The distance-dependent profile has no θ-derivative; it falls back to its
/// value at zero distance here.
pub fn pose_param_velocity_assignment(
    theta: f64,
    theta_dot: f64,
    profile: &VelocityProfile,
    k_theta: f64,
) -> f64 {
    let (target, slope) = profile
        .target(theta)
        .unwrap_or_else(|| (profile.desired_speed(theta, 0.0), 0.0));
    -k_theta * (theta_dot - target) + theta_dot * slope
}

/// Distance feedback law: `θ̈ = −k_θ(θ̇ − θ_vd(d_e⊥))`.
pub fn pose_param_distance_feedback(
    theta_dot: f64,
    distance: f64,
    map: &DistanceMap,
    k_theta: f64,
) -> f64 {
    -k_theta * (theta_dot - map.speed(distance))
}

/// Transverse distance from `p` to `p_d(θ)`: the position offset with its
/// component along the reference tangent removed.
pub fn transverse_distance(p: &Vector3<f64>, desired: &DesiredDualState) -> f64 {
    let offset = p - desired.sample.position;
    let t = desired.tangent();
    (offset - t * t.dot(&offset)).norm()
}

/// How the pose-parameter evolves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ControlMode {
    /// `θ̈` from the velocity-assignment or distance law of `profile`.
    Following { profile: VelocityProfile },
    /// `θ` advanced as a clock at a fixed rate; `θ̈ = 0`.
    Tracking { rate: f64 },
}

/// Everything computed in one control evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ControlOutput {
    pub wrench: Wrench,
    pub theta_ddot: f64,
    pub feedforward: DualTwist,
    pub feedback: DualTwist,
    pub error: ErrorState,
    /// Switch value `sign(q̂_e1)` (reported even when the switch is disabled).
    pub lambda: f64,
    pub transverse_distance: f64,
    pub theta_ddot_saturated: bool,
}

/// Complete control law for one configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Controller {
    pub gains: ControlGains,
    pub mode: ControlMode,
    pub lambda_enabled: bool,
    pub theta_ddot_limit: f64,
}

impl Controller {
    pub fn new(gains: ControlGains, mode: ControlMode) -> Self {
        Self {
            gains,
            mode,
            lambda_enabled: true,
            theta_ddot_limit: DEFAULT_THETA_DDOT_LIMIT,
        }
    }

    /// Pose-parameter acceleration for the current mode, before saturation.
    pub fn pose_parameter_input(&self, state: &AugmentedState, distance: f64) -> f64 {
        match self.mode {
            ControlMode::Tracking { .. } => 0.0,
            ControlMode::Following {
                profile: VelocityProfile::Distance(map),
            } => pose_param_distance_feedback(state.theta_dot, distance, &map, self.gains.k_theta),
            ControlMode::Following { profile } => pose_param_velocity_assignment(
                state.theta,
                state.theta_dot,
                &profile,
                self.gains.k_theta,
            ),
        }
    }

    /// Control at an augmented state whose `θ` lies in the reference range.
    pub fn compute_control(
        &self,
        state: &AugmentedState,
        reference: &dyn GeometricReference,
        params: &BodyParams,
    ) -> Result<ControlOutput> {
        let desired = crate::reference::eval_desired(reference, state.theta)?;
        Ok(self.compute_with_desired(state, &desired, params, false))
    }

    /// Control given a pre-evaluated reference. With `hold` set the
    /// pose-parameter is frozen (terminal regulation) and `θ̈ = 0`.
    pub fn compute_with_desired(
        &self,
        state: &AugmentedState,
        desired: &DesiredDualState,
        params: &BodyParams,
        hold: bool,
    ) -> ControlOutput {
        let err = ErrorState::compute(state, desired);
        let distance = transverse_distance(&state.body.p, desired);
        let lambda = lambda_switch(&err.pose);
        let applied_lambda = if self.lambda_enabled { lambda } else { 1.0 };

        let raw = if hold {
            0.0
        } else {
            self.pose_parameter_input(state, distance)
        };
        let theta_ddot = raw.clamp(-self.theta_ddot_limit, self.theta_ddot_limit);

        let u_fb = feedback_with_lambda(&err.pose, &err.twist, &self.gains, applied_lambda);
        let u_ff = feedforward_from_error(state, desired, params, &err, theta_ddot);
        let wrench = wrench_from_control(&(u_ff + u_fb), &state.body, params);
        ControlOutput {
            wrench,
            theta_ddot,
            feedforward: u_ff,
            feedback: u_fb,
            error: err,
            lambda,
            transverse_distance: distance,
            theta_ddot_saturated: theta_ddot != raw,
        }
    }
}

/// Lyapunov candidate `½ Σ k_p,i (2 ln λq̂_e)_i² + ½ ‖ω̂_e‖²`, non-increasing
/// along closed-loop trajectories when `k_p` is uniform on each part.
pub fn lyapunov_value(err: &ErrorState, gains: &ControlGains, lambda: f64) -> f64 {
    let x = err.pose.scale(lambda).log() * 2.0;
    let weighted = gains.kp.gain_apply(&x);
    let potential: f64 = weighted
        .to_array()
        .iter()
        .zip(x.to_array())
        .map(|(a, b)| a * b)
        .sum();
    0.5 * potential + 0.5 * err.twist.norm().powi(2)
}
