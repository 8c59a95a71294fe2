//! Quaternion, dual vector and dual quaternion algebra.
//!
//! Component order is scalar-first (`w, x, y, z`) everywhere, and dual
//! quaternions are laid out real-then-dual. Exports in the `sim` module follow
//! the same order.

mod dual_quaternion;
mod dual_vector;
mod quaternion;

use serde::{Deserialize, Serialize};

pub use dual_quaternion::{
    dq_adjoint, dq_conj, dq_exp, dq_from_pose, dq_log, dq_mul, dq_to_pose, DualQuaternion,
};
pub use dual_vector::{gain_apply, DualTwist, DualVector};
pub use quaternion::Quaternion;

/// Rotation angles below this use the series form of `atan(x)/x` and `sinc`.
pub const SMALL_ANGLE: f64 = 1e-6;

/// Accepted deviation of `‖q‖` from one when encoding a pose.
pub const UNIT_ROTATION_TOL: f64 = 1e-6;

/// Accepted deviation of `q̂ ∘ q̂*` from `Î` when decoding a pose.
pub const UNIT_DUAL_QUATERNION_TOL: f64 = 1e-6;

/// Unit-ness tolerances used by the pose conversions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub unit_rotation: f64,
    pub unit_dual_quaternion: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            unit_rotation: UNIT_ROTATION_TOL,
            unit_dual_quaternion: UNIT_DUAL_QUATERNION_TOL,
        }
    }
}
