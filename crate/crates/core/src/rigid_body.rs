//! Free rigid body driven directly by a force and a torque.
//!
//! The vector form integrates `p̈ = f/m`, `ω̇ = J⁻¹(τ − ω × Jω)` together with
//! `q̇ = ½ ω ∘ q`. The dual form (`q̂̇ = ½ ω̂ ∘ q̂`, `ω̂̇ = F̂ + Û`) is provided
//! as an independent verification path.

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::dq::{DualQuaternion, DualTwist, Quaternion};
use crate::integrator::{rk4_step, Derivative, OdeState};
use crate::{Error, Result};

/// Mass and inertia, validated on construction.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BodyParams {
    mass: f64,
    inertia: Matrix3<f64>,
    inertia_inv: Matrix3<f64>,
}

impl BodyParams {
    pub fn new(mass: f64, inertia: Matrix3<f64>) -> Result<Self> {
        if !(mass.is_finite() && mass > 0.0) {
            return Err(Error::InvalidBodyParams(format!(
                "mass must be positive, got {mass}"
            )));
        }
        let asym = (inertia - inertia.transpose()).amax();
        if !(asym <= 1e-12 * inertia.amax().max(1.0)) {
            return Err(Error::InvalidBodyParams(
                "inertia matrix is not symmetric".into(),
            ));
        }
        if inertia.cholesky().is_none() {
            return Err(Error::InvalidBodyParams(
                "inertia matrix is not positive definite".into(),
            ));
        }
        let inertia_inv = inertia
            .try_inverse()
            .ok_or_else(|| Error::InvalidBodyParams("inertia matrix is singular".into()))?;
        Ok(Self {
            mass,
            inertia,
            inertia_inv,
        })
    }

    pub fn diagonal(mass: f64, principal: [f64; 3]) -> Result<Self> {
        Self::new(mass, Matrix3::from_diagonal(&Vector3::from(principal)))
    }

    #[inline]
    pub fn mass(&self) -> f64 {
        self.mass
    }

    #[inline]
    pub fn inertia(&self) -> &Matrix3<f64> {
        &self.inertia
    }

    #[inline]
    pub fn inertia_inv(&self) -> &Matrix3<f64> {
        &self.inertia_inv
    }
}

/// Position, linear velocity, attitude and angular velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RigidBodyState {
    pub p: Vector3<f64>,
    pub v: Vector3<f64>,
    pub q: Quaternion,
    pub w: Vector3<f64>,
}

impl Default for RigidBodyState {
    fn default() -> Self {
        Self::at_rest(Vector3::zeros(), Quaternion::identity())
    }
}

impl RigidBodyState {
    pub fn at_rest(p: Vector3<f64>, q: Quaternion) -> Self {
        Self {
            p,
            v: Vector3::zeros(),
            q,
            w: Vector3::zeros(),
        }
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.v.iter()).chain(self.w.iter()).all(|c| c.is_finite())
            && self.q.is_finite()
    }

    pub fn kinetic_energy(&self, params: &BodyParams) -> f64 {
        0.5 * params.mass() * self.v.norm_squared()
            + 0.5 * self.w.dot(&(params.inertia() * self.w))
    }
}

/// Force and torque input.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Wrench {
    pub force: Vector3<f64>,
    pub torque: Vector3<f64>,
}

impl Wrench {
    pub fn new(force: Vector3<f64>, torque: Vector3<f64>) -> Self {
        Self { force, torque }
    }

    pub fn zero() -> Self {
        Self::default()
    }
}

/// `(ṗ, p̈, q̇, ω̇)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateDerivative {
    pub p_dot: Vector3<f64>,
    pub v_dot: Vector3<f64>,
    pub q_dot: Quaternion,
    pub w_dot: Vector3<f64>,
}

impl Derivative for StateDerivative {
    fn weighted_sum(terms: &[(f64, &Self)]) -> Self {
        let mut out = StateDerivative {
            p_dot: Vector3::zeros(),
            v_dot: Vector3::zeros(),
            q_dot: Quaternion::zero(),
            w_dot: Vector3::zeros(),
        };
        for (k, d) in terms {
            out.p_dot += d.p_dot * *k;
            out.v_dot += d.v_dot * *k;
            out.q_dot = out.q_dot + d.q_dot.scale(*k);
            out.w_dot += d.w_dot * *k;
        }
        out
    }
}

impl OdeState for RigidBodyState {
    type Deriv = StateDerivative;

    fn advanced(&self, d: &StateDerivative, h: f64) -> Self {
        Self {
            p: self.p + d.p_dot * h,
            v: self.v + d.v_dot * h,
            q: self.q + d.q_dot.scale(h),
            w: self.w + d.w_dot * h,
        }
    }
}

/// Right-hand side of the rigid-body equations.
pub fn dynamics_deriv(x: &RigidBodyState, u: &Wrench, params: &BodyParams) -> StateDerivative {
    let jw = params.inertia() * x.w;
    StateDerivative {
        p_dot: x.v,
        v_dot: u.force / params.mass(),
        q_dot: (Quaternion::pure(x.w) * x.q).scale(0.5),
        w_dot: params.inertia_inv() * (u.torque - x.w.cross(&jw)),
    }
}

/// Pose `q̂ = q + ε/2 p∘q` and dual twist `ω̂ = ω + ε(ṗ + p × ω)`.
pub fn to_dual_state(x: &RigidBodyState) -> (DualQuaternion, DualTwist) {
    (
        DualQuaternion::from_pose_unchecked(x.p, x.q),
        DualTwist::new(x.w, x.v + x.p.cross(&x.w)),
    )
}

/// Gyroscopic acceleration `J⁻¹(−ω × Jω)`.
fn gyroscopic(x: &RigidBodyState, params: &BodyParams) -> Vector3<f64> {
    -(params.inertia_inv() * x.w.cross(&(params.inertia() * x.w)))
}

/// State-only part `F̂ = a + ε(p × a + ṗ × ω)` of the dual twist rate.
pub fn drift_term(x: &RigidBodyState, params: &BodyParams) -> DualTwist {
    let a = gyroscopic(x, params);
    DualTwist::new(a, x.p.cross(&a) + x.v.cross(&x.w))
}

/// Input part `Û = J⁻¹τ + ε(f/m + p × J⁻¹τ)` of the dual twist rate.
pub fn control_term(u: &Wrench, x: &RigidBodyState, params: &BodyParams) -> DualTwist {
    let alpha = params.inertia_inv() * u.torque;
    DualTwist::new(alpha, u.force / params.mass() + x.p.cross(&alpha))
}

/// Invert [`control_term`]: `τ = J·Û_r`, `f = m·(Û_d − p × Û_r)`.
pub fn wrench_from_control(u_hat: &DualTwist, x: &RigidBodyState, params: &BodyParams) -> Wrench {
    Wrench {
        torque: params.inertia() * u_hat.real,
        force: (u_hat.dual - x.p.cross(&u_hat.real)) * params.mass(),
    }
}

/// One RK4 step under a constant wrench, attitude renormalized afterwards.
pub fn integrate_step(
    x: &RigidBodyState,
    u: &Wrench,
    params: &BodyParams,
    dt: f64,
) -> Result<RigidBodyState> {
    let mut next = rk4_step(x, dt, |s| dynamics_deriv(s, u, params));
    next.q = next.q.normalized();
    if !next.is_finite() {
        return Err(Error::NonFiniteState { time: f64::NAN });
    }
    Ok(next)
}

/// Dual-form state `(q̂, ω̂)` used to cross-check the vector form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DualBodyState {
    pub pose: DualQuaternion,
    pub twist: DualTwist,
}

#[derive(Debug, Clone, Copy)]
pub struct DualBodyDerivative {
    pose_dot: DualQuaternion,
    twist_dot: DualTwist,
}

impl Derivative for DualBodyDerivative {
    fn weighted_sum(terms: &[(f64, &Self)]) -> Self {
        let mut pose_dot = DualQuaternion::new(Quaternion::zero(), Quaternion::zero());
        let mut twist_dot = DualTwist::zero();
        for (k, d) in terms {
            pose_dot = pose_dot + d.pose_dot.scale(*k);
            twist_dot = twist_dot + d.twist_dot.scale(*k);
        }
        Self {
            pose_dot,
            twist_dot,
        }
    }
}

impl OdeState for DualBodyState {
    type Deriv = DualBodyDerivative;

    fn advanced(&self, d: &DualBodyDerivative, h: f64) -> Self {
        Self {
            pose: self.pose + d.pose_dot.scale(h),
            twist: self.twist + d.twist_dot.scale(h),
        }
    }
}

impl DualBodyState {
    pub fn from_state(x: &RigidBodyState) -> Self {
        let (pose, twist) = to_dual_state(x);
        Self { pose, twist }
    }

    /// Recover `(p, ṗ, q, ω)` from the dual pose and twist.
    pub fn to_state(&self) -> RigidBodyState {
        let p = self.pose.translation();
        let w = self.twist.real;
        RigidBodyState {
            p,
            v: self.twist.dual - p.cross(&w),
            q: self.pose.real,
            w,
        }
    }
}

/// `q̂̇ = ½ ω̂ ∘ q̂`, `ω̂̇ = F̂ + Û`.
pub fn dual_form_deriv(
    x: &DualBodyState,
    u: &Wrench,
    params: &BodyParams,
) -> DualBodyDerivative {
    let state = x.to_state();
    DualBodyDerivative {
        pose_dot: (x.twist.to_dual_quaternion() * x.pose).scale(0.5),
        twist_dot: drift_term(&state, params) + control_term(u, &state, params),
    }
}

/// One RK4 step of the dual form, pose renormalized afterwards.
pub fn integrate_dual_step(
    x: &DualBodyState,
    u: &Wrench,
    params: &BodyParams,
    dt: f64,
) -> DualBodyState {
    let mut next = rk4_step(x, dt, |s| dual_form_deriv(s, u, params));
    next.pose = next.pose.normalized();
    next
}
