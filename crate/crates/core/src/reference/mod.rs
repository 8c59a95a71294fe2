//! Geometric references: a path `p_d(θ)` with an attached frame `q_d(θ)`,
//! together with θ-derivatives up to second order.

mod builtin;
mod jet;
mod rmf;
mod spline;

use nalgebra::Vector3;

use crate::dq::{DualQuaternion, DualTwist, Quaternion};
use crate::{Error, Result};

pub use builtin::{build_helix3d, build_sinusoid2d, Helix3d, Sinusoid2d, StraightLine};
pub use rmf::double_reflection_frames;
pub use spline::{
    build_spline_reference, load_spline_samples, PathSample, SampleFile, SplineReference,
    SAMPLE_SCHEMA_VERSION,
};

/// Reference quantities at one pose-parameter value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ReferenceSample {
    pub theta: f64,
    /// `p_d`
    pub position: Vector3<f64>,
    /// `p̊_d`
    pub velocity: Vector3<f64>,
    /// `p̊̊_d`
    pub acceleration: Vector3<f64>,
    /// `q_d`
    pub attitude: Quaternion,
    /// `ω_d`, satisfying `q̊_d = ½ ω_d ∘ q_d`
    pub angular_velocity: Vector3<f64>,
    /// `ω̊_d`
    pub angular_acceleration: Vector3<f64>,
}

/// A C² path with moving frame on `[θ₀, θ_f]`.
pub trait GeometricReference: Send + Sync + std::fmt::Debug {
    fn theta_range(&self) -> (f64, f64);

    /// Evaluate without range checking. Built-ins extend analytically past the
    /// ends; spline references extrapolate with the end polynomials.
    fn sample(&self, theta: f64) -> ReferenceSample;

    fn contains(&self, theta: f64) -> bool {
        let (lo, hi) = self.theta_range();
        theta >= lo && theta <= hi
    }
}

/// Desired dual quaternion, dual twist and the twist's θ-derivative.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DesiredDualState {
    pub pose: DualQuaternion,
    pub twist: DualTwist,
    pub twist_rate: DualTwist,
    pub sample: ReferenceSample,
}

impl DesiredDualState {
    pub fn from_sample(s: &ReferenceSample) -> Self {
        let w = s.angular_velocity;
        let dw = s.angular_acceleration;
        let p = s.position;
        let dp = s.velocity;
        Self {
            pose: DualQuaternion::from_pose_unchecked(p, s.attitude),
            twist: DualTwist::new(w, dp + p.cross(&w)),
            twist_rate: DualTwist::new(dw, s.acceleration + dp.cross(&w) + p.cross(&dw)),
            sample: *s,
        }
    }

    /// Unit tangent `p̊_d / ‖p̊_d‖`, or zero where the path is stationary.
    pub fn tangent(&self) -> Vector3<f64> {
        let n = self.sample.velocity.norm();
        if n > 0.0 {
            self.sample.velocity / n
        } else {
            Vector3::zeros()
        }
    }
}

/// Evaluate `q̂_d(θ)`, `ω̂_d(θ)` and `ω̂̊_d(θ)`.
pub fn eval_desired(reference: &dyn GeometricReference, theta: f64) -> Result<DesiredDualState> {
    let (min, max) = reference.theta_range();
    if !(theta >= min && theta <= max) {
        return Err(Error::ThetaOutOfRange { theta, min, max });
    }
    Ok(DesiredDualState::from_sample(&reference.sample(theta)))
}
