#![allow(dead_code)]

use nalgebra::{Matrix3, Vector3};
use posefollow::reference::{DesiredDualState, ReferenceSample};
use posefollow::rigid_body::{BodyParams, RigidBodyState};
use posefollow::sim::AugmentedState;
use posefollow::Quaternion;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn vec3(rng: &mut ChaCha8Rng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
        rng.gen_range(-scale..scale),
    )
}

/// Uniform on the unit 3-sphere (normalized Gaussian 4-vector).
pub fn unit_quaternion(rng: &mut ChaCha8Rng) -> Quaternion {
    loop {
        let q = Quaternion::new(
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
            rng.gen_range(-1.0..1.0),
        );
        let n = q.norm();
        if n > 1e-3 && n <= 1.0 {
            return q.scale(1.0 / n);
        }
    }
}

pub fn body_state(rng: &mut ChaCha8Rng) -> RigidBodyState {
    RigidBodyState {
        p: vec3(rng, 3.0),
        v: vec3(rng, 2.0),
        q: unit_quaternion(rng),
        w: vec3(rng, 2.0),
    }
}

pub fn augmented(rng: &mut ChaCha8Rng) -> AugmentedState {
    AugmentedState::new(body_state(rng), rng.gen_range(0.0..1.0), rng.gen_range(0.0..2.0))
}

/// Arbitrary reference quantities; the identities under test are algebraic
/// and do not need them to come from one curve.
pub fn reference_sample(rng: &mut ChaCha8Rng) -> ReferenceSample {
    ReferenceSample {
        theta: 0.0,
        position: vec3(rng, 3.0),
        velocity: vec3(rng, 2.0),
        acceleration: vec3(rng, 2.0),
        attitude: unit_quaternion(rng),
        angular_velocity: vec3(rng, 2.0),
        angular_acceleration: vec3(rng, 2.0),
    }
}

pub fn desired(rng: &mut ChaCha8Rng) -> DesiredDualState {
    DesiredDualState::from_sample(&reference_sample(rng))
}

/// Random SPD inertia: `R diag(λ) Rᵀ` with eigenvalues in `[0.005, 0.05]`.
pub fn body_params(rng: &mut ChaCha8Rng) -> BodyParams {
    let r = unit_quaternion(rng).to_rotation_matrix();
    let d = Matrix3::from_diagonal(&Vector3::new(
        rng.gen_range(0.005..0.05),
        rng.gen_range(0.005..0.05),
        rng.gen_range(0.005..0.05),
    ));
    let j = r * d * r.transpose();
    BodyParams::new(rng.gen_range(0.5..2.0), (j + j.transpose()) * 0.5).unwrap()
}
