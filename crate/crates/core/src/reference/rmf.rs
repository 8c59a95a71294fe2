//! Rotation-minimizing frames by the double-reflection method.

use nalgebra::Vector3;

/// Propagate a reference vector `r0` (orthogonal to `tangents[0]`) along
/// sampled points with unit tangents, returning one reference vector per
/// point. Each step reflects the frame across the bisector plane of the chord,
/// then across the plane that maps the reflected tangent onto the next one.
pub fn double_reflection_frames(
    points: &[Vector3<f64>],
    tangents: &[Vector3<f64>],
    r0: Vector3<f64>,
) -> Vec<Vector3<f64>> {
    assert_eq!(points.len(), tangents.len());
    let mut out = Vec::with_capacity(points.len());
    if points.is_empty() {
        return out;
    }
    out.push(r0);
    for i in 0..points.len() - 1 {
        out.push(reflect_step(
            points[i],
            points[i + 1],
            tangents[i],
            tangents[i + 1],
            out[i],
        ));
    }
    out
}

pub(crate) fn reflect_step(
    x0: Vector3<f64>,
    x1: Vector3<f64>,
    t0: Vector3<f64>,
    t1: Vector3<f64>,
    r0: Vector3<f64>,
) -> Vector3<f64> {
    let v1 = x1 - x0;
    let c1 = v1.norm_squared();
    if c1 == 0.0 {
        return r0;
    }
    let r_l = r0 - v1 * (2.0 / c1 * v1.dot(&r0));
    let t_l = t0 - v1 * (2.0 / c1 * v1.dot(&t0));
    let v2 = t1 - t_l;
    let c2 = v2.norm_squared();
    if c2 == 0.0 {
        return r_l;
    }
    r_l - v2 * (2.0 / c2 * v2.dot(&r_l))
}
