use serde::{Deserialize, Serialize};

use crate::dq::Quaternion;
use crate::sim::config::ConvergenceConfig;
use crate::sim::record::RunRecord;

/// Scalar summary of a run, written next to the CSV export.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub name: String,
    pub config_hash: String,
    pub samples: usize,
    pub final_time: f64,
    /// First `t` after which `‖ln q̂_e‖ < tol` holds for the whole hold window.
    pub convergence_time: Option<f64>,
    pub convergence_theta: Option<f64>,
    pub final_err_log_norm: f64,
    pub disturbance_time: Option<f64>,
    pub max_d_perp_post_disturbance: Option<f64>,
    pub max_d_perp: f64,
    /// `|θ̇ − θ_vd|` at the last sample before the end of the reference.
    pub final_theta_dot_error: f64,
    pub lambda_switch_count: usize,
    pub completion_time: Option<f64>,
    /// `Σ 2 acos |⟨q_i, q_{i+1}⟩|` over exported attitudes.
    pub rotation_path_length: f64,
    pub saturated_steps: usize,
    pub positivity_violations: usize,
}

/// Index of the first sample `t` such that every sample in `[t, t + hold]`
/// has `value < tol`, with the window ending inside the series.
pub fn sustained_below(times: &[f64], values: &[f64], tol: f64, hold: f64) -> Option<usize> {
    let mut run_start: Option<usize> = None;
    for (j, (&t, &v)) in times.iter().zip(values).enumerate() {
        if !(v < tol) {
            run_start = None;
            continue;
        }
        let i = *run_start.get_or_insert(j);
        if t - times[i] >= hold - 1e-12 {
            return Some(i);
        }
    }
    None
}

/// Rotation angle between consecutive attitudes, summed. Evaluated as
/// `2 atan2(‖vec r‖, |r_w|)` with `r = q_i* ∘ q_{i+1}` to stay accurate for
/// small steps.
pub fn rotation_path_length(attitudes: &[Quaternion]) -> f64 {
    attitudes
        .windows(2)
        .map(|w| {
            let r = w[0].conj() * w[1];
            2.0 * r.vector().norm().atan2(r.w.abs())
        })
        .sum()
}

pub fn metrics(record: &RunRecord, convergence: &ConvergenceConfig) -> RunSummary {
    let rows = &record.rows;
    let times: Vec<f64> = rows.iter().map(|r| r.t).collect();
    let errs: Vec<f64> = rows.iter().map(|r| r.err_log_norm).collect();
    let conv = sustained_below(&times, &errs, convergence.tolerance, convergence.hold);

    let post = record.events.disturbance_time.map(|td| {
        rows.iter()
            .filter(|r| r.t >= td)
            .map(|r| r.d_perp)
            .fold(0.0, f64::max)
    });
    let active_last = rows.iter().rev().find(|r| !r.held);
    let attitudes: Vec<Quaternion> = rows.iter().map(|r| Quaternion::from_array(r.q)).collect();
    let switches = rows.windows(2).filter(|w| w[0].lambda != w[1].lambda).count();
    let last = rows.last();

    RunSummary {
        name: record.name.clone(),
        config_hash: record.config_hash.clone(),
        samples: rows.len(),
        final_time: last.map_or(0.0, |r| r.t),
        convergence_time: conv.map(|i| rows[i].t),
        convergence_theta: conv.map(|i| rows[i].theta),
        final_err_log_norm: last.map_or(f64::NAN, |r| r.err_log_norm),
        disturbance_time: record.events.disturbance_time,
        max_d_perp_post_disturbance: post,
        max_d_perp: rows.iter().map(|r| r.d_perp).fold(0.0, f64::max),
        final_theta_dot_error: active_last.map_or(f64::NAN, |r| (r.theta_dot - r.theta_vd).abs()),
        lambda_switch_count: switches,
        completion_time: record.events.completion_time,
        rotation_path_length: rotation_path_length(&attitudes),
        saturated_steps: record.events.saturated_steps,
        positivity_violations: record.events.positivity_violations,
    }
}
