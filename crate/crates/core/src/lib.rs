//! Pose-following control of a rigid body with unit dual quaternions.
//!
//! Layers, bottom up: [`dq`] algebra, [`rigid_body`] dynamics, geometric
//! [`reference`]s, [`error_dynamics`], the [`controller`], and the closed-loop
//! [`sim`]ulator with its presets and exports.

// `!(x <= tol)` style checks reject NaN along with out-of-range values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod controller;
pub mod dq;
mod error;
pub mod error_dynamics;
pub mod integrator;
pub mod reference;
pub mod rigid_body;
pub mod sim;

pub use controller::{ControlGains, ControlMode, ControlOutput, Controller, DistanceMap, VelocityProfile};
pub use dq::{DualQuaternion, DualTwist, DualVector, Quaternion};
pub use error::{Error, Result};
pub use error_dynamics::ErrorState;
pub use reference::{DesiredDualState, GeometricReference, ReferenceSample};
pub use rigid_body::{BodyParams, RigidBodyState, Wrench};
pub use sim::{run_closed_loop, AugmentedState, RunRecord, RunSummary, SimConfig};

pub use nalgebra;
