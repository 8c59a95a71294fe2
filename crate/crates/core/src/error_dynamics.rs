//! Pose-following error between the body and the reference at `θ(t)`.
//!
//! The twist error is available in two algebraically distinct forms: the
//! adjoint form `ω̂ + θ̇ Ad_{q̂_e} ω̂_d*` and the structural form
//! `ω_e + ε(ṗ_e + p_e × ω_e)` assembled from the rotational and positional
//! error components. Both are kept so that each can check the other.

use nalgebra::Vector3;

use crate::dq::{DualQuaternion, DualTwist, Quaternion};
use crate::reference::DesiredDualState;
use crate::rigid_body::{drift_term, to_dual_state, BodyParams};
use crate::sim::AugmentedState;

/// Error quantities recomputed from the primitive state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ErrorState {
    /// `q̂_e = q̂ ∘ q̂_d*`
    pub pose: DualQuaternion,
    /// `ω̂_e` in adjoint form
    pub twist: DualTwist,
    /// `p_e = p + Ad_{q_e} p_d*`
    pub position: Vector3<f64>,
    /// `ω_e = ω + θ̇ Ad_{q_e} ω_d*`
    pub angular: Vector3<f64>,
}

impl ErrorState {
    pub fn compute(state: &AugmentedState, desired: &DesiredDualState) -> Self {
        let (pose, twist) = to_dual_state(&state.body);
        let q_e = pose_error(&pose, &desired.pose);
        Self {
            pose: q_e,
            twist: twist_error_adjoint(&twist, state.theta_dot, &q_e, &desired.twist),
            position: position_error(&state.body.p, &q_e.real, &desired.sample.position),
            angular: angular_error(
                &state.body.w,
                state.theta_dot,
                &q_e.real,
                &desired.sample.angular_velocity,
            ),
        }
    }
}

/// `q̂_e = q̂ ∘ q̂_d*`.
pub fn pose_error(pose: &DualQuaternion, desired: &DualQuaternion) -> DualQuaternion {
    *pose * desired.conj()
}

/// `ω̂_e = ω̂ + θ̇ Ad_{q̂_e} ω̂_d*`.
pub fn twist_error_adjoint(
    twist: &DualTwist,
    theta_dot: f64,
    pose_error: &DualQuaternion,
    desired_twist: &DualTwist,
) -> DualTwist {
    *twist + pose_error.adjoint_vector(&desired_twist.conj()) * theta_dot
}

/// `ω̂_e = ω_e + ε(ṗ_e + p_e × ω_e)`.
pub fn twist_error_structural(
    angular: &Vector3<f64>,
    position: &Vector3<f64>,
    position_rate: &Vector3<f64>,
) -> DualTwist {
    DualTwist::new(*angular, position_rate + position.cross(angular))
}

/// Rotational error `q_e = q ∘ q_d*`.
pub fn rotation_error(q: &Quaternion, q_desired: &Quaternion) -> Quaternion {
    *q * q_desired.conj()
}

/// `ω_e = ω + θ̇ Ad_{q_e} ω_d*`.
pub fn angular_error(
    w: &Vector3<f64>,
    theta_dot: f64,
    q_e: &Quaternion,
    w_desired: &Vector3<f64>,
) -> Vector3<f64> {
    w - q_e.rotate(*w_desired) * theta_dot
}

/// `p_e = p + Ad_{q_e} p_d*`.
pub fn position_error(p: &Vector3<f64>, q_e: &Quaternion, p_desired: &Vector3<f64>) -> Vector3<f64> {
    p - q_e.rotate(*p_desired)
}

/// Closed form of `ṗ_e`:
/// `ṗ + ω_e × Ad_{q_e} p_d* + θ̇ Ad_{q_e} p̊_d*`.
pub fn position_error_rate(
    v: &Vector3<f64>,
    angular_error: &Vector3<f64>,
    q_e: &Quaternion,
    p_desired: &Vector3<f64>,
    p_desired_rate: &Vector3<f64>,
    theta_dot: f64,
) -> Vector3<f64> {
    v + angular_error.cross(&(-q_e.rotate(*p_desired))) - q_e.rotate(*p_desired_rate) * theta_dot
}

/// Structural twist error from primitive quantities, with `p_e`, `ω_e` and
/// `ṗ_e` evaluated through their closed forms.
pub fn structural_twist_from_state(
    state: &AugmentedState,
    desired: &DesiredDualState,
) -> DualTwist {
    let (pose, _) = to_dual_state(&state.body);
    let q_e = rotation_error(&pose.real, &desired.sample.attitude);
    let w_e = angular_error(
        &state.body.w,
        state.theta_dot,
        &q_e,
        &desired.sample.angular_velocity,
    );
    let p_e = position_error(&state.body.p, &q_e, &desired.sample.position);
    let p_e_dot = position_error_rate(
        &state.body.v,
        &w_e,
        &q_e,
        &desired.sample.position,
        &desired.sample.velocity,
        state.theta_dot,
    );
    twist_error_structural(&w_e, &p_e, &p_e_dot)
}

/// Right-hand side of the twist-error dynamics:
/// `F̂ + Û + θ̈ Ad_{q̂_e} ω̂_d* + θ̇ d/dt(Ad_{q̂_e} ω̂_d*)|_{θ̈=0}`, where the
/// derivative of the adjoint term uses `q̂̇_e = ½ ω̂_e ∘ q̂_e`.
pub fn error_accel(
    state: &AugmentedState,
    desired: &DesiredDualState,
    params: &BodyParams,
    control: &DualTwist,
    theta_ddot: f64,
) -> DualTwist {
    let err = ErrorState::compute(state, desired);
    let q_e = err.pose;
    let q_e_dot = (err.twist.to_dual_quaternion() * q_e).scale(0.5);
    let wd_conj = desired.twist.conj().to_dual_quaternion();
    let wd_rate_conj = desired.twist_rate.conj().to_dual_quaternion();

    let coupling = q_e_dot * wd_conj * q_e.conj()
        + (q_e * wd_rate_conj * q_e.conj()).scale(state.theta_dot)
        + q_e * wd_conj * q_e_dot.conj();
    let coupling = DualTwist::from_dual_quaternion(&coupling);
    let adjoint = DualTwist::from_dual_quaternion(&q_e.adjoint(&wd_conj));

    drift_term(&state.body, params)
        + *control
        + adjoint * theta_ddot
        + coupling * state.theta_dot
}
