use serde::{Deserialize, Serialize};

use crate::integrator::{Derivative, OdeState};
use crate::rigid_body::{RigidBodyState, StateDerivative};

/// Rigid-body state together with the pose-parameter and its rate.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AugmentedState {
    pub body: RigidBodyState,
    pub theta: f64,
    pub theta_dot: f64,
}

impl AugmentedState {
    pub fn new(body: RigidBodyState, theta: f64, theta_dot: f64) -> Self {
        Self {
            body,
            theta,
            theta_dot,
        }
    }

    pub fn is_finite(&self) -> bool {
        self.body.is_finite() && self.theta.is_finite() && self.theta_dot.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AugmentedDerivative {
    pub body: StateDerivative,
    pub theta_dot: f64,
    pub theta_ddot: f64,
}

impl Derivative for AugmentedDerivative {
    fn weighted_sum(terms: &[(f64, &Self)]) -> Self {
        let body: Vec<(f64, &StateDerivative)> = terms.iter().map(|(k, d)| (*k, &d.body)).collect();
        Self {
            body: StateDerivative::weighted_sum(&body),
            theta_dot: terms.iter().map(|(k, d)| k * d.theta_dot).sum(),
            theta_ddot: terms.iter().map(|(k, d)| k * d.theta_ddot).sum(),
        }
    }
}

impl OdeState for AugmentedState {
    type Deriv = AugmentedDerivative;

    fn advanced(&self, d: &AugmentedDerivative, h: f64) -> Self {
        Self {
            body: self.body.advanced(&d.body, h),
            theta: self.theta + d.theta_dot * h,
            theta_dot: self.theta_dot + d.theta_ddot * h,
        }
    }
}
