use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{DualVector, Quaternion, Tolerances, SMALL_ANGLE};
use crate::{Error, Result};

/// Dual quaternion `real + ε dual`, serialized real-then-dual, each `[w, x, y, z]`.
///
/// Unit dual quaternions encode poses: `q + ε/2 · p ∘ q` for a translation `p`
/// and a rotation `q`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualQuaternion {
    pub real: Quaternion,
    pub dual: Quaternion,
}

impl Default for DualQuaternion {
    fn default() -> Self {
        Self::identity()
    }
}

impl DualQuaternion {
    #[inline]
    pub const fn new(real: Quaternion, dual: Quaternion) -> Self {
        Self { real, dual }
    }

    /// `Î = [1,0,0,0] + ε[0,0,0,0]`.
    #[inline]
    pub const fn identity() -> Self {
        Self::new(Quaternion::identity(), Quaternion::zero())
    }

    pub fn from_array(a: [f64; 8]) -> Self {
        Self::new(
            Quaternion::new(a[0], a[1], a[2], a[3]),
            Quaternion::new(a[4], a[5], a[6], a[7]),
        )
    }

    pub fn to_array(self) -> [f64; 8] {
        let (r, d) = (self.real, self.dual);
        [r.w, r.x, r.y, r.z, d.w, d.x, d.y, d.z]
    }

    /// Pose encoding `q + ε/2 · p ∘ q`. Fails if `q` is not unit within the
    /// default rotation tolerance.
    pub fn from_pose(p: Vector3<f64>, q: Quaternion) -> Result<Self> {
        Self::from_pose_with(p, q, &Tolerances::default())
    }

    pub fn from_pose_with(p: Vector3<f64>, q: Quaternion, tol: &Tolerances) -> Result<Self> {
        let norm = q.norm();
        if !((norm - 1.0).abs() <= tol.unit_rotation) {
            return Err(Error::NonUnitRotation { norm });
        }
        Ok(Self::from_pose_unchecked(p, q))
    }

    #[inline]
    pub fn from_pose_unchecked(p: Vector3<f64>, q: Quaternion) -> Self {
        Self::new(q, (Quaternion::pure(p) * q).scale(0.5))
    }

    /// Inverse of [`from_pose`](Self::from_pose): `p = 2 · vec(dual ∘ real*)`.
    /// The rotation is returned with its sign as stored.
    pub fn to_pose(&self) -> Result<(Vector3<f64>, Quaternion)> {
        self.to_pose_with(&Tolerances::default())
    }

    pub fn to_pose_with(&self, tol: &Tolerances) -> Result<(Vector3<f64>, Quaternion)> {
        let residual = self.unit_residual();
        if !(residual <= tol.unit_dual_quaternion) {
            return Err(Error::NonUnitDualQuaternion { residual });
        }
        Ok((self.translation(), self.real))
    }

    /// Translation `2 · vec(dual ∘ real*)`, no unit check.
    #[inline]
    pub fn translation(&self) -> Vector3<f64> {
        (self.dual * self.real.conj()).vector() * 2.0
    }

    /// `q̂* = q_r* + ε q_d*`.
    #[inline]
    pub fn conj(&self) -> Self {
        Self::new(self.real.conj(), self.dual.conj())
    }

    #[inline]
    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.real.scale(k), self.dual.scale(k))
    }

    /// Largest component deviation of `q̂ ∘ q̂*` from `Î`.
    pub fn unit_residual(&self) -> f64 {
        (*self * self.conj()).max_abs_diff(&Self::identity())
    }

    pub fn is_unit(&self, tol: f64) -> bool {
        self.unit_residual() <= tol
    }

    /// Renormalize: unit rotation, and dual part projected so that
    /// `q_r · q_d = 0`.
    pub fn normalized(&self) -> Self {
        let n = self.real.norm();
        let real = self.real.scale(1.0 / n);
        let dual = self.dual.scale(1.0 / n);
        let dual = dual - real.scale(real.dot(&dual));
        Self::new(real, dual)
    }

    /// Logarithm `ln q̂ = ½(φ + ε p)` with `φ = |φ| n`, `|φ| ∈ [0, 2π]`
    /// taken as `2·atan2(‖v‖, s)`.
    ///
    /// At exactly `−Î` (and any pure translation composed with it) the axis
    /// is undefined; the rotation part is returned as zero there.
    pub fn log(&self) -> DualVector {
        let s = self.real.w;
        let v = self.real.vector();
        let r = v.norm();
        let angle = 2.0 * r.atan2(s);
        let scale = if angle < SMALL_ANGLE {
            // atan(x)/x ≈ 1 − x²/3 with x = r/s
            let x = r / s;
            (2.0 / s) * (1.0 - x * x / 3.0)
        } else if r == 0.0 {
            0.0
        } else {
            angle / r
        };
        DualVector::new(v * (0.5 * scale), self.translation() * 0.5)
    }

    /// Inverse of [`log`](Self::log) on `‖v.real‖ < π`.
    pub fn exp(v: &DualVector) -> Result<Self> {
        let half_angle = v.real.norm();
        if !(half_angle < std::f64::consts::PI) {
            return Err(Error::AngleOutOfRange {
                angle: 2.0 * half_angle,
            });
        }
        let sinc = if 2.0 * half_angle < SMALL_ANGLE {
            1.0 - half_angle * half_angle / 6.0
        } else {
            half_angle.sin() / half_angle
        };
        let q = Quaternion::from_parts(half_angle.cos(), v.real * sinc);
        Ok(Self::from_pose_unchecked(v.dual * 2.0, q))
    }

    /// Adjoint action `Ad_g v = g ∘ v ∘ g*` (g unit).
    pub fn adjoint(&self, v: &DualQuaternion) -> DualQuaternion {
        *self * *v * self.conj()
    }

    /// Adjoint action restricted to dual vector quaternions.
    pub fn adjoint_vector(&self, v: &DualVector) -> DualVector {
        DualVector::from_dual_quaternion(&self.adjoint(&v.to_dual_quaternion()))
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        self.real
            .max_abs_diff(&other.real)
            .max(self.dual.max_abs_diff(&other.dual))
    }

    pub fn is_finite(&self) -> bool {
        self.real.is_finite() && self.dual.is_finite()
    }
}

impl Mul for DualQuaternion {
    type Output = Self;

    /// `q_r1 ∘ q_r2 + ε(q_r1 ∘ q_d2 + q_d1 ∘ q_r2)`.
    #[inline]
    fn mul(self, b: Self) -> Self {
        Self::new(
            self.real * b.real,
            self.real * b.dual + self.dual * b.real,
        )
    }
}

impl Add for DualQuaternion {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self::new(self.real + b.real, self.dual + b.dual)
    }
}

impl Sub for DualQuaternion {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self::new(self.real - b.real, self.dual - b.dual)
    }
}

impl Neg for DualQuaternion {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.real, -self.dual)
    }
}

/// Free-function aliases mirroring the operation names used across the crate.
pub fn dq_mul(a: &DualQuaternion, b: &DualQuaternion) -> DualQuaternion {
    *a * *b
}

pub fn dq_conj(a: &DualQuaternion) -> DualQuaternion {
    a.conj()
}

pub fn dq_from_pose(p: Vector3<f64>, q: Quaternion) -> Result<DualQuaternion> {
    DualQuaternion::from_pose(p, q)
}

pub fn dq_to_pose(a: &DualQuaternion) -> Result<(Vector3<f64>, Quaternion)> {
    a.to_pose()
}

pub fn dq_log(a: &DualQuaternion) -> DualVector {
    a.log()
}

pub fn dq_exp(v: &DualVector) -> Result<DualQuaternion> {
    DualQuaternion::exp(v)
}

pub fn dq_adjoint(g: &DualQuaternion, v: &DualQuaternion) -> DualQuaternion {
    g.adjoint(v)
}
