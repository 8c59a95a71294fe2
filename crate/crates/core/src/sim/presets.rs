//! Experiment presets: convergence from several poses, velocity assignment,
//! the λ-switch ablation, and tracking versus following under a disturbance.

use std::str::FromStr;

use nalgebra::Vector3;

use crate::controller::{DistanceMap, DistancePreset, VelocityProfile};
use crate::dq::Quaternion;
use crate::reference::{GeometricReference, Helix3d, Sinusoid2d};
use crate::sim::config::{
    BodyConfig, ConvergenceConfig, Disturbance, GainConfig, InitialPose, ModeConfig,
    ReferenceConfig, SimConfig, Trigger, CONFIG_SCHEMA_VERSION,
};
use crate::{Error, Result};

/// Slow constant pose-parameter speed.
pub const SLOW_RATE: f64 = 0.019;
/// Fast constant pose-parameter speed.
pub const FAST_RATE: f64 = 0.075;
/// Nominal pose-parameter speed of the disturbance comparison.
pub const FIG3_NOMINAL_RATE: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Fig2Variant {
    Convergence,
    Velocity,
    Lambda,
}

impl FromStr for Fig2Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "convergence" => Ok(Self::Convergence),
            "velocity" => Ok(Self::Velocity),
            "lambda" => Ok(Self::Lambda),
            other => Err(Error::UnknownVariant(other.to_string())),
        }
    }
}

/// Start poses for the convergence runs: position offset from `p_d(0)` and a
/// rotation (axis, angle in degrees) composed with `q_d(0)`.
const FIG2_POSES: [([f64; 3], [f64; 3], f64); 4] = [
    ([-2.0, -2.0, 0.0], [0.0, 0.0, 1.0], 90.0),
    ([2.0, 2.0, 1.0], [1.0, 0.0, 0.0], 150.0),
    ([-1.0, 1.0, -2.0], [1.0, 1.0, 1.0], 120.0),
    ([1.0, -1.0, 2.0], [0.0, 1.0, 0.0], -100.0),
];

fn base(name: String, reference: ReferenceConfig, mode: ModeConfig, initial: InitialPose) -> SimConfig {
    SimConfig {
        schema_version: CONFIG_SCHEMA_VERSION,
        name,
        body: BodyConfig::default(),
        gains: GainConfig::default(),
        reference,
        mode,
        initial,
        theta0: None,
        theta_dot0: 0.0,
        disturbance: None,
        lambda_enabled: true,
        theta_ddot_limit: crate::controller::DEFAULT_THETA_DDOT_LIMIT,
        dt: 1e-3,
        export_rate: 100.0,
        duration: 1.0,
        stop_after_completion: Some(0.5),
        convergence: ConvergenceConfig::default(),
        seed: 0,
        tolerances: Default::default(),
    }
}

/// Time budget to traverse `length` of pose-parameter at `rate` starting from
/// rest, with margin.
fn traverse_budget(length: f64, rate: f64) -> f64 {
    (length / rate + 5.0).ceil()
}

fn constant(value: f64) -> ModeConfig {
    ModeConfig::Following {
        profile: VelocityProfile::Constant { value },
    }
}

fn offset_pose(offset: [f64; 3], axis: [f64; 3], degrees: f64) -> InitialPose {
    let start = Helix3d::default().sample(0.0);
    let rot = Quaternion::from_axis_angle(Vector3::from(axis), degrees.to_radians());
    InitialPose::Explicit {
        position: (start.position + Vector3::from(offset)).into(),
        attitude: (rot * start.attitude).to_array(),
        velocity: [0.0; 3],
        angular_velocity: [0.0; 3],
    }
}

pub fn preset_fig2(variant: Fig2Variant) -> Vec<SimConfig> {
    match variant {
        Fig2Variant::Convergence => {
            let mut out = Vec::new();
            for (i, &(offset, axis, deg)) in FIG2_POSES.iter().enumerate() {
                for (label, rate) in [("slow", SLOW_RATE), ("fast", FAST_RATE)] {
                    let mut c = base(
                        format!("fig2-convergence-pose{}-{label}", i + 1),
                        ReferenceConfig::Helix3d,
                        constant(rate),
                        offset_pose(offset, axis, deg),
                    );
                    c.duration = traverse_budget(1.0, rate);
                    out.push(c);
                }
            }
            out
        }
        Fig2Variant::Velocity => {
            let on_reference = InitialPose::OnReference {
                matched_twist: false,
            };
            let profiles = [
                ("slow", VelocityProfile::Constant { value: SLOW_RATE }),
                ("fast", VelocityProfile::Constant { value: FAST_RATE }),
                (
                    "sinusoidal",
                    VelocityProfile::Sinusoidal {
                        mean: 0.05,
                        amplitude: 0.025,
                        frequency: 2.0,
                    },
                ),
            ];
            profiles
                .into_iter()
                .map(|(label, profile)| {
                    let lowest = match profile {
                        VelocityProfile::Sinusoidal { mean, amplitude, .. } => mean - amplitude,
                        _ => profile.desired_speed(0.0, 0.0),
                    };
                    let mut c = base(
                        format!("fig2-velocity-{label}"),
                        ReferenceConfig::Helix3d,
                        ModeConfig::Following { profile },
                        on_reference,
                    );
                    c.duration = traverse_budget(1.0, lowest);
                    c
                })
                .collect()
        }
        Fig2Variant::Lambda => {
            // 250° about a tilted axis: the error starts on the far side of the
            // double cover
            let initial = offset_pose([0.5, -0.5, 0.5], [1.0, 2.0, 0.5], 250.0);
            [true, false]
                .into_iter()
                .map(|enabled| {
                    let mut c = base(
                        format!("fig2-lambda-{}", if enabled { "on" } else { "off" }),
                        ReferenceConfig::Helix3d,
                        constant(FAST_RATE),
                        initial,
                    );
                    c.lambda_enabled = enabled;
                    c.duration = traverse_budget(1.0, FAST_RATE);
                    c
                })
                .collect()
        }
    }
}

/// Parse a variant name and build its configs.
pub fn preset_fig2_named(variant: &str) -> Result<Vec<SimConfig>> {
    Ok(preset_fig2(variant.parse()?))
}

/// Time for `θ` to advance by `length` starting from rest under
/// `θ̈ = −k(θ̇ − v)`: the root of `v(t − (1 − e^{−kt})/k) = length`.
pub fn following_completion_time(length: f64, v: f64, k: f64) -> f64 {
    let f = |t: f64| v * (t - (1.0 - (-k * t).exp()) / k) - length;
    let df = |t: f64| v * (1.0 - (-k * t).exp());
    let mut t = length / v + 1.0 / k;
    for _ in 0..50 {
        let step = f(t) / df(t);
        t -= step;
        if step.abs() < 1e-14 * t {
            break;
        }
    }
    t
}

/// Default disturbance: `0.5 m/s` in-plane transverse to the path and
/// `2 rad/s` about the plane normal, at the middle of the reference.
pub fn fig3_disturbance() -> Disturbance {
    let reference = Sinusoid2d::default();
    let (lo, hi) = reference.theta_range();
    let mid = 0.5 * (lo + hi);
    let tangent = reference.sample(mid).velocity.normalize();
    let normal = Vector3::z();
    let transverse = normal.cross(&tangent) * 0.5;
    Disturbance {
        trigger: Trigger::Theta(mid),
        delta_v: transverse.into(),
        delta_w: (normal * 2.0).into(),
    }
}

/// Tracking plus three following variants on the sinusoid, from rest, with a
/// shared disturbance. The tracking clock rate is calibrated so that both
/// schemes finish at the same time when undisturbed.
pub fn preset_fig3() -> Vec<SimConfig> {
    let (lo, hi) = Sinusoid2d::default().theta_range();
    let k_theta = GainConfig::default().k_theta;
    let t_follow = following_completion_time(hi - lo, FIG3_NOMINAL_RATE, k_theta);
    let tracking_rate = (hi - lo) / t_follow;
    let initial = InitialPose::OnReference {
        matched_twist: false,
    };
    let mut out = vec![base(
        "fig3-tracking".into(),
        ReferenceConfig::Sinusoid2d,
        ModeConfig::Tracking {
            rate: tracking_rate,
        },
        initial,
    )];
    for preset in DistancePreset::ALL {
        out.push(base(
            format!("fig3-{}", preset.name()),
            ReferenceConfig::Sinusoid2d,
            ModeConfig::Following {
                profile: VelocityProfile::Distance(DistanceMap::preset(preset, FIG3_NOMINAL_RATE)),
            },
            initial,
        ));
    }
    for c in &mut out {
        c.disturbance = Some(fig3_disturbance());
        // slowest variant needs headroom after the disturbance
        c.duration = (t_follow * 2.0).ceil();
    }
    out
}

/// All preset names accepted by the command line.
pub const PRESET_NAMES: [&str; 4] = ["fig2-convergence", "fig2-velocity", "fig2-lambda", "fig3"];

pub fn preset_by_name(name: &str) -> Result<Vec<SimConfig>> {
    match name {
        "fig3" => Ok(preset_fig3()),
        other => match other.strip_prefix("fig2-") {
            Some(variant) => preset_fig2_named(variant),
            None => Err(Error::UnknownVariant(other.to_string())),
        },
    }
}
