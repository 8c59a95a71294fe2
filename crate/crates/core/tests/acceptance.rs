//! Acceptance gate: one PASS/FAIL line per primary criterion. Exits non-zero
//! if any criterion fails.

mod common;

use std::process::ExitCode;
use std::thread;

use nalgebra::{Matrix4, Translation3, UnitQuaternion, Vector3};
use posefollow::controller::{feedback, feedforward, ControlGains};
use posefollow::dq::DualQuaternion;
use posefollow::error_dynamics::{
    angular_error, error_accel, position_error, position_error_rate, rotation_error,
    structural_twist_from_state, ErrorState,
};
use posefollow::reference::{GeometricReference, Helix3d};
use posefollow::rigid_body::{integrate_step, BodyParams, RigidBodyState, Wrench};
use posefollow::sim::{
    metrics, preset_fig2, preset_fig3, run_closed_loop, Fig2Variant, RunRecord, RunSummary,
    SimConfig,
};
use posefollow::Quaternion;
use rand::Rng;

struct Check {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn check(name: &'static str, pass: bool, detail: String) -> Check {
    Check { name, pass, detail }
}

fn htm(p: &Vector3<f64>, q: &Quaternion) -> Matrix4<f64> {
    let uq = UnitQuaternion::from_quaternion(nalgebra::Quaternion::new(q.w, q.x, q.y, q.z));
    (Translation3::from(*p) * uq).to_homogeneous()
}

/// Dual quaternion composition against homogeneous transforms, 1000 pairs.
fn algebra_oracle() -> Check {
    let mut rng = common::rng(1);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let (p1, q1) = (common::vec3(&mut rng, 10.0), common::unit_quaternion(&mut rng));
        let (p2, q2) = (common::vec3(&mut rng, 10.0), common::unit_quaternion(&mut rng));
        let a = DualQuaternion::from_pose(p1, q1).unwrap();
        let b = DualQuaternion::from_pose(p2, q2).unwrap();
        let (p, q) = (a * b).to_pose().unwrap();
        let expected = htm(&p1, &q1) * htm(&p2, &q2);
        worst = worst.max((htm(&p, &q) - expected).amax());
    }
    check(
        "algebra oracle: dual quaternion composition vs homogeneous transforms (1000 pairs, < 1e-10)",
        worst < 1e-10,
        format!("max component error {worst:.3e}"),
    )
}

/// Adjoint and structural twist errors agree; rate identities as sub-checks.
fn twist_error_forms() -> Check {
    let mut rng = common::rng(2);
    let (mut thm, mut l1, mut l3, mut expand): (f64, f64, f64, f64) = (0.0, 0.0, 0.0, 0.0);
    for _ in 0..10_000 {
        let s = common::augmented(&mut rng);
        let d = common::desired(&mut rng);
        let err = ErrorState::compute(&s, &d);
        let structural = structural_twist_from_state(&s, &d);
        thm = thm.max(err.twist.max_abs_diff(&structural));

        let q_e = rotation_error(&s.body.q, &d.sample.attitude);
        let w_e = angular_error(&s.body.w, s.theta_dot, &q_e, &d.sample.angular_velocity);
        l1 = l1.max((err.twist.real - w_e).amax());

        let p_e = position_error(&s.body.p, &q_e, &d.sample.position);
        let ad_wd = -q_e.rotate(d.sample.angular_velocity);
        let ad_pd = -q_e.rotate(d.sample.position);
        let rhs = s.body.p.cross(&s.body.w) + s.body.p.cross(&ad_wd) * s.theta_dot + ad_pd.cross(&w_e);
        l3 = l3.max((p_e.cross(&w_e) - rhs).amax());

        let ad = err.pose.adjoint_vector(&d.twist.conj());
        let ad_vd = -q_e.rotate(d.sample.velocity);
        expand = expand
            .max((ad.real - ad_wd).amax())
            .max((ad.dual - (s.body.p.cross(&ad_wd) + ad_vd)).amax());
    }

    // rate identities along exact motions on the helix, by central differences
    let helix = Helix3d::default();
    let mut l1_rate: f64 = 0.0;
    let mut l2_rate: f64 = 0.0;
    for _ in 0..500 {
        let body = common::body_state(&mut rng);
        let theta = rng.gen_range(0.1..0.9);
        let theta_dot = rng.gen_range(0.0..0.5);
        let at = |t: f64| {
            let q = Quaternion::from_axis_angle(body.w, body.w.norm() * t) * body.q;
            let p = body.p + body.v * t;
            let s = helix.sample(theta + theta_dot * t);
            let q_e = rotation_error(&q, &s.attitude);
            (q_e, position_error(&p, &q_e, &s.position))
        };
        let h = 1e-5;
        let (qp, pp) = at(h);
        let (qm, pm) = at(-h);
        let (q_e, _) = at(0.0);
        let s = helix.sample(theta);
        let w_e = angular_error(&body.w, theta_dot, &q_e, &s.angular_velocity);
        let q_e_dot = (qp - qm).scale(0.5 / h);
        let rot_rate = (Quaternion::pure(w_e) * q_e).scale(0.5);
        l1_rate = l1_rate.max(q_e_dot.max_abs_diff(&rot_rate));
        let p_e_dot = (pp - pm) / (2.0 * h);
        let pos_rate = position_error_rate(&body.v, &w_e, &q_e, &s.position, &s.velocity, theta_dot);
        l2_rate = l2_rate.max((p_e_dot - pos_rate).amax());
    }
    let pass = thm < 1e-10 && l1 < 1e-10 && l3 < 1e-10 && expand < 1e-10 && l1_rate < 1e-6 && l2_rate < 1e-6;
    check(
        "twist error: adjoint form equals structural form (1e4 tuples, < 1e-10)",
        pass,
        format!(
            "structural {thm:.2e}; real part {l1:.2e}; cross-product identity {l3:.2e}; \
             adjoint expansion {expand:.2e}; attitude-error rate {l1_rate:.2e}; \
             position-error rate {l2_rate:.2e} (finite differences, < 1e-6)"
        ),
    )
}

/// Feedforward removes everything but the feedback from the twist-error rate.
fn feedforward_cancellation() -> Check {
    let mut rng = common::rng(3);
    let gains = ControlGains::uniform(3.0, 1.0).unwrap();
    let mut worst: f64 = 0.0;
    for _ in 0..10_000 {
        let s = common::augmented(&mut rng);
        let d = common::desired(&mut rng);
        let params = common::body_params(&mut rng);
        let theta_ddot = rng.gen_range(-2.0..2.0);
        let err = ErrorState::compute(&s, &d);
        let u_fb = feedback(&err.pose, &err.twist, &gains);
        let u_ff = feedforward(&s, &d, &params, theta_ddot);
        let rate = error_accel(&s, &d, &params, &(u_ff + u_fb), theta_ddot);
        worst = worst.max(rate.max_abs_diff(&u_fb));
    }
    check(
        "feedforward cancellation: twist-error rate equals feedback (1e4 tuples, < 1e-10)",
        worst < 1e-10,
        format!("max residual {worst:.3e}"),
    )
}

fn run_all(configs: &[SimConfig]) -> Vec<(RunRecord, RunSummary)> {
    thread::scope(|scope| {
        let handles: Vec<_> = configs
            .iter()
            .map(|c| {
                scope.spawn(move || {
                    let r = run_closed_loop(c).unwrap();
                    let m = metrics(&r, &c.convergence);
                    (r, m)
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().unwrap()).collect()
    })
}

/// Eight runs from four poses at two speeds.
fn pose_convergence() -> Check {
    let configs = preset_fig2(Fig2Variant::Convergence);
    let runs = run_all(&configs);
    let mut pass = runs.len() == 8;
    let mut lines = Vec::new();
    for (c, (_, m)) in configs.iter().zip(&runs) {
        let ok = match (m.convergence_time, m.completion_time) {
            (Some(tc), Some(tf)) => tc + c.convergence.hold <= tf,
            _ => false,
        };
        pass &= ok;
        lines.push(format!(
            "{} t={:?} θ={:.4}",
            m.name,
            m.convergence_time,
            m.convergence_theta.unwrap_or(f64::NAN)
        ));
    }
    for pair in runs.chunks(2) {
        let slow = pair[0].1.convergence_theta.unwrap_or(f64::INFINITY);
        let fast = pair[1].1.convergence_theta.unwrap_or(f64::NEG_INFINITY);
        pass &= slow < fast;
    }
    check(
        "pose convergence: 8 runs reach ‖ln q̂_e‖ < 1e-3 for 1 s before θ_f; slow converges at smaller θ",
        pass,
        lines.join("; "),
    )
}

/// `θ̇ − θ_vd(θ)` decays exactly as `e^{−t}`.
fn velocity_assignment() -> Check {
    let configs = preset_fig2(Fig2Variant::Velocity);
    let runs = run_all(&configs);
    let mut pass = true;
    let mut lines = Vec::new();
    for (r, m) in &runs {
        let active: Vec<_> = r.rows.iter().filter(|row| !row.held).collect();
        let e0 = active[0].theta_dot - active[0].theta_vd;
        let worst = active
            .iter()
            .map(|row| ((row.theta_dot - row.theta_vd) - e0 * (-row.t).exp()).abs())
            .fold(0.0, f64::max);
        let ok = worst < 1e-5 && m.final_theta_dot_error < 1e-5 && e0.abs() > 1e-3;
        pass &= ok;
        lines.push(format!(
            "{}: max deviation from e^-t {worst:.2e}, final |θ̇−θ_vd| {:.2e}",
            m.name, m.final_theta_dot_error
        ));
    }
    check(
        "velocity assignment: |θ̇ − θ_vd| follows e^-t within 1e-5 (constant and sinusoidal)",
        pass,
        lines.join("; "),
    )
}

/// λ-switch ablation from an error with negative scalar part.
fn lambda_ablation() -> Check {
    let configs = preset_fig2(Fig2Variant::Lambda);
    let runs = run_all(&configs);
    let (on, on_m) = &runs[0];
    let (off, off_m) = &runs[1];
    let negative_start = on.rows[0].lambda < 0.0 && off.rows[0].lambda < 0.0;
    let off_converged = off_m.convergence_time.is_some();
    // at convergence the off run sits at +Î and the on run at −Î
    let sign_at = |r: &RunRecord, m: &RunSummary| {
        m.convergence_time
            .and_then(|t| r.rows.iter().find(|row| row.t >= t))
            .map(|row| row.lambda)
    };
    let off_sign = sign_at(off, off_m);
    let on_sign = sign_at(on, on_m);
    let shorter = on_m.rotation_path_length < off_m.rotation_path_length;
    check(
        "λ ablation: switch shortens rotation path; without it the run still converges to +Î",
        negative_start && off_converged && off_sign == Some(1.0) && shorter,
        format!(
            "path on {:.4} rad vs off {:.4} rad; off converged at {:?} with sign {:?}; on at {:?} with sign {:?}",
            on_m.rotation_path_length,
            off_m.rotation_path_length,
            off_m.convergence_time,
            off_sign,
            on_m.convergence_time,
            on_sign
        ),
    )
}

/// Disturbance response of tracking versus three following variants.
fn tracking_vs_following() -> Check {
    let configs = preset_fig3();
    let undisturbed: Vec<SimConfig> = configs
        .iter()
        .cloned()
        .map(|mut c| {
            c.disturbance = None;
            c
        })
        .collect();
    let all: Vec<SimConfig> = configs.iter().chain(&undisturbed).cloned().collect();
    let runs = run_all(&all);
    let max_dev: Vec<f64> = runs[..4]
        .iter()
        .map(|(_, m)| m.max_d_perp_post_disturbance.unwrap_or(f64::NAN))
        .collect();
    let times: Vec<f64> = runs[4..]
        .iter()
        .map(|(_, m)| m.completion_time.unwrap_or(f64::NAN))
        .collect();
    let tracking = max_dev[0];
    let ordering = tracking > max_dev[1] && max_dev[1] > 0.0 && max_dev[1..].iter().all(|d| *d < tracking);
    let spread = times.iter().map(|t| (t / times[0] - 1.0).abs()).fold(0.0, f64::max);
    check(
        "tracking vs following: tracking has the largest post-disturbance d⊥; undisturbed completion times within 1%",
        ordering && spread < 0.01,
        format!(
            "max d⊥ tracking {:.4}, progressive {:.4}, medium {:.4}, conservative {:.4}; \
             undisturbed completion {:?} (spread {:.2e})",
            max_dev[0], max_dev[1], max_dev[2], max_dev[3], times, spread
        ),
    )
}

/// Ballistic flight against its closed form, and torque-free momentum.
fn integrator_checks() -> Check {
    let dt = 1e-3;
    let steps = 10_000;
    let params = BodyParams::diagonal(2.0, [0.01, 0.01, 0.01]).unwrap();
    let g = Vector3::new(0.0, 0.0, -9.81);
    let force = Wrench::new(g * params.mass(), Vector3::zeros());
    let x0 = RigidBodyState {
        p: Vector3::new(1.0, -2.0, 0.5),
        v: Vector3::new(3.0, 1.0, 12.0),
        q: Quaternion::from_axis_angle(Vector3::new(1.0, 1.0, 0.0), 0.4),
        w: Vector3::new(0.3, -0.7, 1.1),
    };
    let mut x = x0;
    for _ in 0..steps {
        x = integrate_step(&x, &force, &params, dt).unwrap();
    }
    let t = steps as f64 * dt;
    let p_exact = x0.p + x0.v * t + g * (0.5 * t * t);
    // spherical body: ω constant, attitude a fixed-axis rotation
    let q_exact = Quaternion::from_axis_angle(x0.w, x0.w.norm() * t) * x0.q;
    let ballistic = (x.p - p_exact)
        .amax()
        .max((x.v - (x0.v + g * t)).amax())
        .max(x.q.aligned_with(&q_exact).max_abs_diff(&q_exact))
        .max((x.w - x0.w).amax());

    // ‖Jω‖ is the invariant of the torque-free Euler equation; checked for the
    // isotropic inertia of the presets and for an asymmetric one
    let mut drift: f64 = 0.0;
    for principal in [[0.01, 0.01, 0.01], [0.01, 0.02, 0.03]] {
        let params = BodyParams::diagonal(1.0, principal).unwrap();
        let momentum = |s: &RigidBodyState| (params.inertia() * s.w).norm();
        let mut x = RigidBodyState {
            w: Vector3::new(1.0, 0.2, -0.5),
            ..x0
        };
        let l0 = momentum(&x);
        for _ in 0..steps {
            x = integrate_step(&x, &Wrench::zero(), &params, dt).unwrap();
            drift = drift.max((momentum(&x) - l0).abs());
        }
    }
    check(
        "integrator: ballistic closed form to 1e-6; torque-free angular momentum to 1e-8 over 10 s",
        ballistic < 1e-6 && drift < 1e-8,
        format!("ballistic error {ballistic:.2e}; momentum drift {drift:.2e}"),
    )
}

fn main() -> ExitCode {
    let checks: Vec<fn() -> Check> = vec![
        algebra_oracle,
        twist_error_forms,
        feedforward_cancellation,
        pose_convergence,
        velocity_assignment,
        lambda_ablation,
        tracking_vs_following,
        integrator_checks,
    ];
    let mut failed = 0;
    for f in checks {
        let c = f();
        println!("{} {}", if c.pass { "PASS" } else { "FAIL" }, c.name);
        println!("     {}", c.detail);
        if !c.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} failed", failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
