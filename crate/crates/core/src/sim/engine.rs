use log::{debug, info, warn};

use crate::controller::{lyapunov_value, ControlMode, ControlOutput, Controller};
use crate::integrator::rk4_step;
use crate::reference::{DesiredDualState, GeometricReference};
use crate::rigid_body::{dynamics_deriv, BodyParams};
use crate::sim::config::{Scenario, SimConfig};
use crate::sim::record::{RecordRow, RunEvents, RunRecord};
use crate::sim::state::{AugmentedDerivative, AugmentedState};
use crate::{Error, Result};

/// Reference evaluated at `θ` clamped into its range.
fn desired_at(reference: &dyn GeometricReference, theta: f64) -> DesiredDualState {
    let (lo, hi) = reference.theta_range();
    DesiredDualState::from_sample(&reference.sample(theta.clamp(lo, hi)))
}

/// Closed-loop right-hand side. With `held` the pose-parameter is frozen.
pub fn closed_loop_deriv(
    state: &AugmentedState,
    reference: &dyn GeometricReference,
    params: &BodyParams,
    controller: &Controller,
    held: bool,
) -> (AugmentedDerivative, ControlOutput) {
    let desired = desired_at(reference, state.theta);
    let out = controller.compute_with_desired(state, &desired, params, held);
    let body = dynamics_deriv(&state.body, &out.wrench, params);
    let theta_dot = if held { 0.0 } else { state.theta_dot };
    (
        AugmentedDerivative {
            body,
            theta_dot,
            theta_ddot: out.theta_ddot,
        },
        out,
    )
}

fn make_row(
    t: f64,
    state: &AugmentedState,
    scenario: &Scenario,
    held: bool,
) -> RecordRow {
    let desired = desired_at(scenario.reference.as_ref(), state.theta);
    let ctrl = &scenario.controller;
    let out = ctrl.compute_with_desired(state, &desired, &scenario.params, held);
    let applied_lambda = if ctrl.lambda_enabled { out.lambda } else { 1.0 };
    let theta_vd = match ctrl.mode {
        ControlMode::Tracking { rate } => rate,
        ControlMode::Following { profile } => {
            profile.desired_speed(state.theta, out.transverse_distance)
        }
    };
    RecordRow {
        t,
        theta: state.theta,
        theta_dot: state.theta_dot,
        p: state.body.p.into(),
        q: state.body.q.to_array(),
        p_d: desired.sample.position.into(),
        q_d: desired.sample.attitude.to_array(),
        d_perp: out.transverse_distance,
        err_log_norm: out.error.pose.scale(out.lambda).log().norm(),
        lambda: out.lambda,
        force: out.wrench.force.into(),
        torque: out.wrench.torque.into(),
        theta_ddot: out.theta_ddot,
        theta_vd,
        lyapunov: lyapunov_value(&out.error, &ctrl.gains, applied_lambda),
        held,
    }
}

/// Simulate a validated scenario.
pub fn run_scenario(config: &SimConfig, scenario: &Scenario) -> Result<RunRecord> {
    let dt = config.dt;
    let reference = scenario.reference.as_ref();
    let (_, theta_f) = reference.theta_range();
    let mut state = scenario.initial;
    let mut held = false;
    let mut events = RunEvents::default();
    let mut disturbance_pending = config.disturbance;
    let mut rows = Vec::with_capacity(scenario.total_steps / scenario.steps_per_export + 1);

    for step in 0..=scenario.total_steps {
        let t = step as f64 * dt;
        if let Some(d) = disturbance_pending {
            if d.is_triggered(t, state.theta) {
                state.body = d.apply(&state.body);
                disturbance_pending = None;
                events.disturbance_time = Some(t);
                debug!("{}: disturbance applied at t = {t}", config.name);
            }
        }

        if step % scenario.steps_per_export == 0 {
            rows.push(make_row(t, &state, scenario, held));
            let stop = match (events.completion_time, config.stop_after_completion) {
                (Some(tc), Some(extra)) => t >= tc + extra,
                _ => false,
            };
            if stop {
                break;
            }
        }
        if step == scenario.total_steps {
            break;
        }

        let mut stage = 0;
        let next = rk4_step(&state, dt, |s| {
            let (d, out) = closed_loop_deriv(s, reference, &scenario.params, &scenario.controller, held);
            if stage == 0 && out.theta_ddot_saturated {
                events.saturated_steps += 1;
            }
            stage += 1;
            d
        });
        let prev_theta = state.theta;
        state = next;
        state.body.q = state.body.q.normalized();

        if !state.is_finite() {
            return Err(Error::NonFiniteState { time: t + dt });
        }
        if held {
            state.theta = theta_f;
            state.theta_dot = 0.0;
        } else if state.theta >= theta_f {
            let frac = (theta_f - prev_theta) / (state.theta - prev_theta);
            let tc = t + dt * frac.clamp(0.0, 1.0);
            events.completion_time = Some(tc);
            info!("{}: reached end of reference at t = {tc:.4}", config.name);
            state.theta = theta_f;
            state.theta_dot = 0.0;
            held = true;
        } else if state.theta_dot < 0.0 {
            if events.positivity_violations == 0 {
                warn!("{}: pose-parameter rate negative at t = {}", config.name, t + dt);
            }
            events.positivity_violations += 1;
        }
    }

    if events.saturated_steps > 0 {
        warn!(
            "{}: pose-parameter acceleration saturated on {} steps",
            config.name, events.saturated_steps
        );
    }
    Ok(RunRecord {
        name: config.name.clone(),
        config_hash: config.hash(),
        rows,
        events,
        theta_range: reference.theta_range(),
    })
}

/// Validate `config` and simulate it.
pub fn run_closed_loop(config: &SimConfig) -> Result<RunRecord> {
    let scenario = config.scenario()?;
    run_scenario(config, &scenario)
}
