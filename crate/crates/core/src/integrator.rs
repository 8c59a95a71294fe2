//! Fixed-step classical Runge–Kutta.

/// Tangent-space quantity produced by an ODE right-hand side.
pub trait Derivative: Sized {
    /// `Σ wᵢ · kᵢ`.
    fn weighted_sum(terms: &[(f64, &Self)]) -> Self;
}

/// State that can be advanced along a derivative by a step `h`.
pub trait OdeState: Sized {
    type Deriv: Derivative;

    fn advanced(&self, d: &Self::Deriv, h: f64) -> Self;
}

/// One RK4 step of size `h`. No projection is applied; callers renormalize
/// manifold components afterwards.
pub fn rk4_step<S, F>(x: &S, h: f64, mut f: F) -> S
where
    S: OdeState,
    F: FnMut(&S) -> S::Deriv,
{
    let k1 = f(x);
    let k2 = f(&x.advanced(&k1, 0.5 * h));
    let k3 = f(&x.advanced(&k2, 0.5 * h));
    let k4 = f(&x.advanced(&k3, h));
    let d = S::Deriv::weighted_sum(&[
        (1.0 / 6.0, &k1),
        (2.0 / 6.0, &k2),
        (2.0 / 6.0, &k3),
        (1.0 / 6.0, &k4),
    ]);
    x.advanced(&d, h)
}
