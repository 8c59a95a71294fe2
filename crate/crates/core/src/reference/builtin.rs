use std::f64::consts::PI;

use nalgebra::Vector3;

use super::jet::Jet;
use super::{GeometricReference, ReferenceSample};
use crate::dq::Quaternion;

type JetVec = [Jet; 3];

fn value(v: &JetVec) -> Vector3<f64> {
    Vector3::new(v[0].v, v[1].v, v[2].v)
}

fn first(v: &JetVec) -> Vector3<f64> {
    Vector3::new(v[0].d, v[1].d, v[2].d)
}

fn second(v: &JetVec) -> Vector3<f64> {
    Vector3::new(v[0].dd, v[1].dd, v[2].dd)
}

/// Frame `R = Rz(heading) · Ry(−pitch)`: x-axis along
/// `(cos p cos h, cos p sin h, sin p)`, y-axis horizontal.
fn heading_pitch_frame(theta: f64, position: &JetVec, heading: Jet, pitch: Jet) -> ReferenceSample {
    let qz = Quaternion::from_axis_angle(Vector3::z(), heading.v);
    let qy = Quaternion::from_axis_angle(Vector3::y(), -pitch.v);
    let (sh, ch) = heading.v.sin_cos();
    // Rz(h)·ŷ and its heading derivative ẑ × Rz(h)·ŷ
    let lateral = Vector3::new(-sh, ch, 0.0);
    let lateral_rate = Vector3::new(-ch, -sh, 0.0);
    let angular_velocity = Vector3::z() * heading.d - lateral * pitch.d;
    let angular_acceleration =
        Vector3::z() * heading.dd - lateral * pitch.dd - lateral_rate * (pitch.d * heading.d);
    ReferenceSample {
        theta,
        position: value(position),
        velocity: first(position),
        acceleration: second(position),
        attitude: qz * qy,
        angular_velocity,
        angular_acceleration,
    }
}

/// `p_d = (θ, 0, 0)`, `q_d = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StraightLine {
    theta0: f64,
    theta_f: f64,
}

impl StraightLine {
    pub fn new(theta0: f64, theta_f: f64) -> Self {
        Self { theta0, theta_f }
    }
}

impl GeometricReference for StraightLine {
    fn theta_range(&self) -> (f64, f64) {
        (self.theta0, self.theta_f)
    }

    fn sample(&self, theta: f64) -> ReferenceSample {
        ReferenceSample {
            theta,
            position: Vector3::new(theta, 0.0, 0.0),
            velocity: Vector3::x(),
            acceleration: Vector3::zeros(),
            attitude: Quaternion::identity(),
            angular_velocity: Vector3::zeros(),
            angular_acceleration: Vector3::zeros(),
        }
    }
}

/// Helix with linearly growing radius. Frame: x along the tangent, y
/// horizontal, z completing the right-handed triad. The tangent is never
/// vertical, so the frame is smooth everywhere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Helix3d {
    pub radius0: f64,
    pub radius_growth: f64,
    pub turns: f64,
    pub height: f64,
}

impl Default for Helix3d {
    fn default() -> Self {
        Self {
            radius0: 2.0,
            radius_growth: 1.0,
            turns: 1.0,
            height: 2.0,
        }
    }
}

impl GeometricReference for Helix3d {
    fn theta_range(&self) -> (f64, f64) {
        (0.0, 1.0)
    }

    fn sample(&self, theta: f64) -> ReferenceSample {
        let t = Jet::variable(theta);
        let spin = 2.0 * PI * self.turns;
        let s = t * spin;
        let r = Jet::constant(self.radius0) + t * self.radius_growth;
        let position = [r * s.cos(), r * s.sin(), t * self.height];
        // horizontal tangent is Rz(s)·(r', r s', 0); r s' > 0 keeps the
        // heading offset inside (0, π) and continuous
        let offset = (r * spin).atan2(Jet::constant(self.radius_growth));
        let heading = s + offset;
        let horizontal = (Jet::constant(self.radius_growth * self.radius_growth)
            + r * r * (spin * spin))
            .sqrt();
        let pitch = Jet::constant(self.height).atan2(horizontal);
        heading_pitch_frame(theta, &position, heading, pitch)
    }
}

/// Planar sinusoid `p_d = (θ, a·sin(kθ), 0)` in the xy-plane, frame x-axis on
/// the unit tangent and z-axis on the plane normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Sinusoid2d {
    pub amplitude: f64,
    pub wavenumber: f64,
    pub theta_f: f64,
}

impl Default for Sinusoid2d {
    fn default() -> Self {
        Self {
            amplitude: 1.0,
            wavenumber: 1.0,
            theta_f: 4.0 * PI,
        }
    }
}

impl GeometricReference for Sinusoid2d {
    fn theta_range(&self) -> (f64, f64) {
        (0.0, self.theta_f)
    }

    fn sample(&self, theta: f64) -> ReferenceSample {
        let t = Jet::variable(theta);
        let phase = t * self.wavenumber;
        let position = [t, phase.sin() * self.amplitude, Jet::constant(0.0)];
        let heading = (phase.cos() * (self.amplitude * self.wavenumber)).atan2(Jet::constant(1.0));
        heading_pitch_frame(theta, &position, heading, Jet::constant(0.0))
    }
}

pub fn build_helix3d() -> Helix3d {
    Helix3d::default()
}

pub fn build_sinusoid2d() -> Sinusoid2d {
    Sinusoid2d::default()
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::Matrix3;

    /// `2·vec(q̊ ∘ q*)` with `q̊` by central differences.
    fn fd_angular_velocity(r: &dyn GeometricReference, theta: f64, h: f64) -> Vector3<f64> {
        let q = r.sample(theta).attitude;
        let qp = r.sample(theta + h).attitude.aligned_with(&q);
        let qm = r.sample(theta - h).attitude.aligned_with(&q);
        let dq = (qp - qm).scale(0.5 / h);
        (dq * q.conj()).vector() * 2.0
    }

    fn check_reference(r: &dyn GeometricReference) {
        let (lo, hi) = r.theta_range();
        for i in 0..100 {
            let theta = lo + (hi - lo) * (i as f64 + 0.5) / 100.0;
            let s = r.sample(theta);
            let rot = s.attitude.to_rotation_matrix();
            assert!((rot.transpose() * rot - Matrix3::identity()).amax() < 1e-10);
            let fd = fd_angular_velocity(r, theta, 1e-5);
            assert!(
                (fd - s.angular_velocity).amax() < 1e-6,
                "ω_d mismatch at θ={theta}: {fd} vs {}",
                s.angular_velocity
            );
            // x-axis of the frame is the unit tangent
            let x_axis = rot.column(0).into_owned();
            assert!((x_axis - s.velocity.normalize()).amax() < 1e-12);
        }
        // no sign flips along a fine grid
        let mut prev = r.sample(lo).attitude;
        let n = ((hi - lo) / 1e-3) as usize;
        for i in 1..=n {
            let q = r.sample(lo + i as f64 * 1e-3).attitude;
            assert!(q.max_abs_diff(&prev) < 1e-2, "jump at step {i}");
            prev = q;
        }
    }

    #[test]
    fn helix_frame_properties() {
        check_reference(&build_helix3d());
    }

    #[test]
    fn sinusoid_frame_properties() {
        check_reference(&build_sinusoid2d());
    }

    #[test]
    fn sinusoid_crest_rotation_rate_along_normal() {
        // crest at θ = π/2: heading = atan(cos θ) has rate −sin θ/(1 + cos²θ) = −1
        let s = build_sinusoid2d().sample(PI / 2.0);
        assert!((s.angular_velocity - Vector3::new(0.0, 0.0, -1.0)).amax() < 1e-12);
        assert_eq!(s.position.z, 0.0);
    }
}
