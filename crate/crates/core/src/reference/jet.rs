//! Second-order forward-mode derivatives in one variable.

use std::ops::{Add, Div, Mul, Neg, Sub};

/// `(f, f', f'')` at a point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub(crate) struct Jet {
    pub v: f64,
    pub d: f64,
    pub dd: f64,
}

impl Jet {
    pub const fn new(v: f64, d: f64, dd: f64) -> Self {
        Self { v, d, dd }
    }

    pub const fn constant(v: f64) -> Self {
        Self::new(v, 0.0, 0.0)
    }

    pub const fn variable(v: f64) -> Self {
        Self::new(v, 1.0, 0.0)
    }

    /// Apply `g` with `g(v)`, `g'(v)`, `g''(v)` known.
    fn chain(self, g: f64, g1: f64, g2: f64) -> Self {
        Self::new(g, g1 * self.d, g2 * self.d * self.d + g1 * self.dd)
    }

    pub fn sin(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(s, c, -s)
    }

    pub fn cos(self) -> Self {
        let (s, c) = self.v.sin_cos();
        self.chain(c, -s, -c)
    }

    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        self.chain(r, 0.5 / r, -0.25 / (r * self.v))
    }

    /// `atan2(self, x)` with derivatives from `d atan2(y, x) = (x dy − y dx)/(x² + y²)`.
    pub fn atan2(self, x: Jet) -> Self {
        let y = self;
        let r2 = x * x + y * y;
        let num = x * Jet::new(y.d, y.dd, 0.0) - y * Jet::new(x.d, x.dd, 0.0);
        let first = num / r2;
        Self::new(y.v.atan2(x.v), first.v, first.d)
    }
}

impl Add for Jet {
    type Output = Self;
    fn add(self, b: Self) -> Self {
        Self::new(self.v + b.v, self.d + b.d, self.dd + b.dd)
    }
}

impl Sub for Jet {
    type Output = Self;
    fn sub(self, b: Self) -> Self {
        Self::new(self.v - b.v, self.d - b.d, self.dd - b.dd)
    }
}

impl Neg for Jet {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d, -self.dd)
    }
}

impl Mul for Jet {
    type Output = Self;
    fn mul(self, b: Self) -> Self {
        Self::new(
            self.v * b.v,
            self.d * b.v + self.v * b.d,
            self.dd * b.v + 2.0 * self.d * b.d + self.v * b.dd,
        )
    }
}

impl Mul<f64> for Jet {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self::new(self.v * k, self.d * k, self.dd * k)
    }
}

impl Div for Jet {
    type Output = Self;
    fn div(self, b: Self) -> Self {
        let inv = b.chain(1.0 / b.v, -1.0 / (b.v * b.v), 2.0 / (b.v * b.v * b.v));
        self * inv
    }
}
