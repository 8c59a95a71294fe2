use std::ops::{Add, Mul, Neg, Sub};

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::{DualQuaternion, Quaternion};

/// Dual vector quaternion `[0, a] + ε[0, b]`: a dual quaternion whose scalar
/// parts vanish. Twists, wrenches-as-accelerations, logarithms and gains all
/// live here.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DualVector {
    pub real: Vector3<f64>,
    pub dual: Vector3<f64>,
}

/// Dual twist `ω + ε(ṗ + p × ω)`.
pub type DualTwist = DualVector;

impl DualVector {
    #[inline]
    pub const fn new(real: Vector3<f64>, dual: Vector3<f64>) -> Self {
        Self { real, dual }
    }

    #[inline]
    pub fn zero() -> Self {
        Self::new(Vector3::zeros(), Vector3::zeros())
    }

    /// Gain vector with every real component `kr` and every dual component `kd`.
    pub fn uniform(kr: f64, kd: f64) -> Self {
        Self::new(Vector3::repeat(kr), Vector3::repeat(kd))
    }

    pub fn from_array(a: [f64; 6]) -> Self {
        Self::new(
            Vector3::new(a[0], a[1], a[2]),
            Vector3::new(a[3], a[4], a[5]),
        )
    }

    pub fn to_array(self) -> [f64; 6] {
        [
            self.real.x,
            self.real.y,
            self.real.z,
            self.dual.x,
            self.dual.y,
            self.dual.z,
        ]
    }

    /// Embed as a dual quaternion with zero scalar parts.
    pub fn to_dual_quaternion(self) -> DualQuaternion {
        DualQuaternion::new(Quaternion::pure(self.real), Quaternion::pure(self.dual))
    }

    /// Drop the scalar parts of a dual quaternion. Callers are responsible
    /// for only projecting values whose scalar parts are (numerically) zero.
    pub fn from_dual_quaternion(q: &DualQuaternion) -> Self {
        Self::new(q.real.vector(), q.dual.vector())
    }

    /// Quaternion conjugate; for a vector quaternion this is negation.
    #[inline]
    pub fn conj(&self) -> Self {
        -*self
    }

    #[inline]
    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.real * k, self.dual * k)
    }

    /// Euclidean norm over all six components.
    pub fn norm(&self) -> f64 {
        (self.real.norm_squared() + self.dual.norm_squared()).sqrt()
    }

    /// Gain product `k ⊙ v`: diagonal scaling of the real part by `k.real`
    /// and of the dual part by `k.dual`.
    pub fn gain_apply(&self, v: &DualVector) -> DualVector {
        DualVector::new(
            self.real.component_mul(&v.real),
            self.dual.component_mul(&v.dual),
        )
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        (self.real - other.real)
            .amax()
            .max((self.dual - other.dual).amax())
    }

    pub fn is_finite(&self) -> bool {
        self.real.iter().chain(self.dual.iter()).all(|c| c.is_finite())
    }
}

/// Free-function form of [`DualVector::gain_apply`].
pub fn gain_apply(k: &DualVector, v: &DualVector) -> DualVector {
    k.gain_apply(v)
}

impl Add for DualVector {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self::new(self.real + b.real, self.dual + b.dual)
    }
}

impl Sub for DualVector {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self::new(self.real - b.real, self.dual - b.dual)
    }
}

impl Neg for DualVector {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.real, -self.dual)
    }
}

impl Mul<f64> for DualVector {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale(k)
    }
}

impl Mul<DualVector> for f64 {
    type Output = DualVector;
    fn mul(self, v: DualVector) -> DualVector {
        v.scale(self)
    }
}
