//! References interpolated from sampled poses.
//!
//! Positions use not-a-knot cubic splines per component. Attitudes are
//! sign-canonicalized along θ, interpolated componentwise with the same
//! splines and projected back onto the unit sphere, which keeps them C² and
//! gives closed-form derivatives. Samples without an attitude are filled in
//! with a rotation-minimizing frame.

use std::path::Path;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use super::jet::Jet;
use super::rmf::reflect_step;
use super::{GeometricReference, ReferenceSample};
use crate::dq::{Quaternion, UNIT_ROTATION_TOL};
use crate::{Error, Result};

pub const SAMPLE_SCHEMA_VERSION: u32 = 1;

/// One sampled pose. `q` is scalar-first; when omitted the frame is
/// propagated from the previous sample by double reflection with the x-axis
/// on the path tangent.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PathSample {
    pub theta: f64,
    pub p: [f64; 3],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<[f64; 4]>,
}

/// On-disk sample file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleFile {
    pub schema_version: u32,
    pub samples: Vec<PathSample>,
}

pub fn load_spline_samples(path: impl AsRef<Path>) -> Result<Vec<PathSample>> {
    let text = std::fs::read_to_string(path)?;
    let file: SampleFile = serde_json::from_str(&text)?;
    if file.schema_version != SAMPLE_SCHEMA_VERSION {
        return Err(Error::ConfigInvalid(format!(
            "unsupported sample schema version {} (expected {SAMPLE_SCHEMA_VERSION})",
            file.schema_version
        )));
    }
    Ok(file.samples)
}

#[derive(Debug, Clone)]
struct CubicSpline {
    knots: Vec<f64>,
    values: Vec<f64>,
    second: Vec<f64>,
}

impl CubicSpline {
    /// Not-a-knot spline; needs at least four strictly increasing knots.
    fn new(knots: &[f64], values: &[f64]) -> Self {
        let n = knots.len();
        debug_assert!(n >= 4);
        let h: Vec<f64> = knots.windows(2).map(|w| w[1] - w[0]).collect();
        let slope: Vec<f64> = (0..n - 1).map(|i| (values[i + 1] - values[i]) / h[i]).collect();

        // Unknowns M_1..M_{n-2}; the end values are eliminated through the
        // third-derivative continuity conditions at x_1 and x_{n-2}.
        let m = n - 2;
        let mut sub = vec![0.0; m];
        let mut diag = vec![0.0; m];
        let mut sup = vec![0.0; m];
        let mut rhs = vec![0.0; m];
        for k in 0..m {
            let i = k + 1;
            sub[k] = h[i - 1];
            diag[k] = 2.0 * (h[i - 1] + h[i]);
            sup[k] = h[i];
            rhs[k] = 6.0 * (slope[i] - slope[i - 1]);
        }
        let (h0, h1) = (h[0], h[1]);
        diag[0] += h0 * (h0 + h1) / h1;
        sup[0] -= h0 * h0 / h1;
        let (a, b) = (h[n - 3], h[n - 2]);
        diag[m - 1] += b * (a + b) / a;
        sub[m - 1] -= b * b / a;

        // Thomas algorithm
        for k in 1..m {
            let w = sub[k] / diag[k - 1];
            diag[k] -= w * sup[k - 1];
            rhs[k] -= w * rhs[k - 1];
        }
        let mut inner = vec![0.0; m];
        inner[m - 1] = rhs[m - 1] / diag[m - 1];
        for k in (0..m - 1).rev() {
            inner[k] = (rhs[k] - sup[k] * inner[k + 1]) / diag[k];
        }

        let mut second = vec![0.0; n];
        second[1..n - 1].copy_from_slice(&inner);
        second[0] = ((h0 + h1) * second[1] - h0 * second[2]) / h1;
        second[n - 1] = ((a + b) * second[n - 2] - b * second[n - 3]) / a;
        Self {
            knots: knots.to_vec(),
            values: values.to_vec(),
            second,
        }
    }

    fn eval(&self, x: f64) -> Jet {
        let n = self.knots.len();
        let i = self
            .knots
            .partition_point(|&k| k <= x)
            .saturating_sub(1)
            .min(n - 2);
        let h = self.knots[i + 1] - self.knots[i];
        let a = (self.knots[i + 1] - x) / h;
        let b = (x - self.knots[i]) / h;
        let (y0, y1) = (self.values[i], self.values[i + 1]);
        let (m0, m1) = (self.second[i], self.second[i + 1]);
        Jet::new(
            a * y0 + b * y1 + ((a * a * a - a) * m0 + (b * b * b - b) * m1) * h * h / 6.0,
            (y1 - y0) / h - (3.0 * a * a - 1.0) / 6.0 * h * m0 + (3.0 * b * b - 1.0) / 6.0 * h * m1,
            a * m0 + b * m1,
        )
    }
}

/// Reference interpolated through sampled poses.
#[derive(Debug, Clone)]
pub struct SplineReference {
    position: [CubicSpline; 3],
    attitude: [CubicSpline; 4],
    range: (f64, f64),
    knot_attitudes: Vec<Quaternion>,
}

impl SplineReference {
    /// Sign-canonicalized attitudes at the knots (after frame filling).
    pub fn knot_attitudes(&self) -> &[Quaternion] {
        &self.knot_attitudes
    }
}

fn frame_from_tangent(t: Vector3<f64>, lateral_hint: Vector3<f64>) -> Quaternion {
    let x = t.normalize();
    let y = (lateral_hint - x * x.dot(&lateral_hint)).normalize();
    let z = x.cross(&y);
    Quaternion::from_rotation_matrix(&Matrix3::from_columns(&[x, y, z]))
}

/// Interpolate sampled poses into a C² reference.
pub fn build_spline_reference(samples: &[PathSample]) -> Result<SplineReference> {
    if samples.len() < 4 {
        return Err(Error::InsufficientSamples { got: samples.len() });
    }
    for (i, w) in samples.windows(2).enumerate() {
        if !(w[1].theta > w[0].theta) {
            return Err(Error::NonMonotonicTheta { index: i + 1 });
        }
    }
    let thetas: Vec<f64> = samples.iter().map(|s| s.theta).collect();
    let position = [0, 1, 2].map(|k| {
        let vals: Vec<f64> = samples.iter().map(|s| s.p[k]).collect();
        CubicSpline::new(&thetas, &vals)
    });

    let points: Vec<Vector3<f64>> = samples.iter().map(|s| Vector3::from(s.p)).collect();
    let tangents: Vec<Vector3<f64>> = thetas
        .iter()
        .map(|&t| {
            let d = Vector3::new(position[0].eval(t).d, position[1].eval(t).d, position[2].eval(t).d);
            d.normalize()
        })
        .collect();

    let mut attitudes: Vec<Quaternion> = Vec::with_capacity(samples.len());
    for (i, s) in samples.iter().enumerate() {
        let q = match s.q {
            Some(a) => {
                let q = Quaternion::from_array(a);
                let norm = q.norm();
                if !((norm - 1.0).abs() <= UNIT_ROTATION_TOL) {
                    return Err(Error::NonUnitRotation { norm });
                }
                q.normalized()
            }
            None if i == 0 => {
                let t = tangents[0];
                // horizontal lateral axis unless the path starts vertical
                let hint = if t.z.abs() < 0.9 {
                    Vector3::z().cross(&t)
                } else {
                    Vector3::y()
                };
                frame_from_tangent(t, hint)
            }
            None => {
                let prev_lateral = attitudes[i - 1].rotate(Vector3::y());
                let r = reflect_step(
                    points[i - 1],
                    points[i],
                    tangents[i - 1],
                    tangents[i],
                    prev_lateral,
                );
                frame_from_tangent(tangents[i], r)
            }
        };
        let q = match attitudes.last() {
            Some(prev) => q.aligned_with(prev),
            None => q,
        };
        attitudes.push(q);
    }

    let attitude = [0, 1, 2, 3].map(|k| {
        let vals: Vec<f64> = attitudes.iter().map(|q| q.to_array()[k]).collect();
        CubicSpline::new(&thetas, &vals)
    });

    Ok(SplineReference {
        position,
        attitude,
        range: (thetas[0], thetas[thetas.len() - 1]),
        knot_attitudes: attitudes,
    })
}

impl GeometricReference for SplineReference {
    fn theta_range(&self) -> (f64, f64) {
        self.range
    }

    fn sample(&self, theta: f64) -> ReferenceSample {
        let p = [0, 1, 2].map(|k| self.position[k].eval(theta));
        let c = [0, 1, 2, 3].map(|k| self.attitude[k].eval(theta));
        let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2] + c[3] * c[3]).sqrt();
        let u = c.map(|ck| ck / norm);
        let q = Quaternion::new(u[0].v, u[1].v, u[2].v, u[3].v);
        let dq = Quaternion::new(u[0].d, u[1].d, u[2].d, u[3].d);
        let ddq = Quaternion::new(u[0].dd, u[1].dd, u[2].dd, u[3].dd);
        ReferenceSample {
            theta,
            position: Vector3::new(p[0].v, p[1].v, p[2].v),
            velocity: Vector3::new(p[0].d, p[1].d, p[2].d),
            acceleration: Vector3::new(p[0].dd, p[1].dd, p[2].dd),
            attitude: q,
            angular_velocity: (dq * q.conj()).vector() * 2.0,
            angular_acceleration: (ddq * q.conj() + dq * dq.conj()).vector() * 2.0,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::reference::{build_helix3d, GeometricReference};

    fn helix_samples(n: usize, with_attitude: bool) -> Vec<PathSample> {
        let helix = build_helix3d();
        (0..n)
            .map(|i| {
                let theta = i as f64 / (n - 1) as f64;
                let s = helix.sample(theta);
                PathSample {
                    theta,
                    p: s.position.into(),
                    q: with_attitude.then(|| s.attitude.to_array()),
                }
            })
            .collect()
    }

    #[test]
    fn cubic_data_is_reproduced_exactly() {
        let knots = [0.0, 0.3, 1.1, 1.5, 2.4, 3.0];
        let f = |x: f64| 2.0 * x * x * x - x * x + 0.5 * x - 3.0;
        let vals: Vec<f64> = knots.iter().map(|&x| f(x)).collect();
        let s = CubicSpline::new(&knots, &vals);
        for x in [0.1, 0.7, 1.3, 2.0, 2.9] {
            let j = s.eval(x);
            assert!((j.v - f(x)).abs() < 1e-12);
            assert!((j.d - (6.0 * x * x - 2.0 * x + 0.5)).abs() < 1e-11);
            assert!((j.dd - (12.0 * x - 2.0)).abs() < 1e-10);
        }
    }

    #[test]
    fn too_few_samples() {
        let samples = helix_samples(2, true);
        assert!(matches!(
            build_spline_reference(&samples),
            Err(Error::InsufficientSamples { got: 2 })
        ));
    }

    #[test]
    fn non_monotonic_theta() {
        let mut samples = helix_samples(6, true);
        samples[3].theta = samples[2].theta;
        assert!(matches!(
            build_spline_reference(&samples),
            Err(Error::NonMonotonicTheta { index: 3 })
        ));
    }

    #[test]
    fn antipodal_samples_are_canonicalized() {
        let mut samples = helix_samples(10, true);
        for s in samples.iter_mut().skip(1).step_by(2) {
            s.q = s.q.map(|q| q.map(|c| -c));
        }
        let r = build_spline_reference(&samples).unwrap();
        for w in r.knot_attitudes().windows(2) {
            assert!(w[0].dot(&w[1]) >= 0.0);
        }
    }

    #[test]
    fn reproduces_helix_between_knots() {
        let helix = build_helix3d();
        let r = build_spline_reference(&helix_samples(201, true)).unwrap();
        let mut worst: f64 = 0.0;
        for i in 0..200 {
            let theta = (i as f64 + 0.5) / 200.0;
            let a = r.sample(theta);
            let b = helix.sample(theta);
            worst = worst
                .max((a.position - b.position).amax())
                .max(a.attitude.aligned_with(&b.attitude).max_abs_diff(&b.attitude));
        }
        assert!(worst < 1e-4, "worst deviation {worst}");
    }

    #[test]
    fn filled_frames_follow_tangent() {
        let r = build_spline_reference(&helix_samples(101, false)).unwrap();
        for i in 0..50 {
            let theta = (i as f64 + 0.25) / 50.0;
            let s = r.sample(theta);
            let x = s.attitude.rotate(Vector3::x());
            assert!((x - s.velocity.normalize()).amax() < 1e-3);
            assert!((s.attitude.norm() - 1.0).abs() < 1e-12);
        }
    }
}
