use std::io::Write;

use serde::{Deserialize, Serialize};

/// Exported column names, in file order.
pub const CSV_COLUMNS: [&str; 27] = [
    "t",
    "theta",
    "theta_dot",
    "px",
    "py",
    "pz",
    "qw",
    "qx",
    "qy",
    "qz",
    "pdx",
    "pdy",
    "pdz",
    "qdw",
    "qdx",
    "qdy",
    "qdz",
    "d_perp",
    "err_log_norm",
    "lambda",
    "fx",
    "fy",
    "fz",
    "taux",
    "tauy",
    "tauz",
    "theta_ddot",
];

/// One sampled instant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecordRow {
    pub t: f64,
    pub theta: f64,
    pub theta_dot: f64,
    pub p: [f64; 3],
    pub q: [f64; 4],
    pub p_d: [f64; 3],
    pub q_d: [f64; 4],
    pub d_perp: f64,
    /// `‖ln(λ q̂_e)‖` with `λ = sign(q̂_e1)`: distance to the nearer of `±Î`.
    pub err_log_norm: f64,
    /// `sign(scalar part of q̂_e)`, recorded whether or not the switch is used.
    pub lambda: f64,
    pub force: [f64; 3],
    pub torque: [f64; 3],
    pub theta_ddot: f64,
    /// Not exported: desired pose-parameter speed at this instant.
    pub theta_vd: f64,
    /// Not exported: Lyapunov value with the applied `λ`.
    pub lyapunov: f64,
    /// Not exported: terminal hold active.
    pub held: bool,
}

impl RecordRow {
    fn values(&self) -> [f64; 27] {
        let [px, py, pz] = self.p;
        let [qw, qx, qy, qz] = self.q;
        let [pdx, pdy, pdz] = self.p_d;
        let [qdw, qdx, qdy, qdz] = self.q_d;
        let [fx, fy, fz] = self.force;
        let [tx, ty, tz] = self.torque;
        [
            self.t,
            self.theta,
            self.theta_dot,
            px,
            py,
            pz,
            qw,
            qx,
            qy,
            qz,
            pdx,
            pdy,
            pdz,
            qdw,
            qdx,
            qdy,
            qdz,
            self.d_perp,
            self.err_log_norm,
            self.lambda,
            fx,
            fy,
            fz,
            tx,
            ty,
            tz,
            self.theta_ddot,
        ]
    }

    pub fn is_finite(&self) -> bool {
        self.values().iter().all(|v| v.is_finite())
    }
}

/// Run events recorded at step resolution.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct RunEvents {
    pub disturbance_time: Option<f64>,
    pub completion_time: Option<f64>,
    /// Integration steps that hit the `θ̈` bound.
    pub saturated_steps: usize,
    /// Steps that ended with `θ̇ < 0`.
    pub positivity_violations: usize,
}

/// Time series of a closed-loop run sampled at the export rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub name: String,
    pub config_hash: String,
    pub rows: Vec<RecordRow>,
    pub events: RunEvents,
    /// `(θ₀, θ_f)` of the reference.
    pub theta_range: (f64, f64),
}

impl RunRecord {
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "{}", CSV_COLUMNS.join(","))?;
        for row in &self.rows {
            let values = row.values();
            let mut line = String::with_capacity(27 * 22);
            for (i, v) in values.iter().enumerate() {
                if i > 0 {
                    line.push(',');
                }
                line.push_str(&v.to_string());
            }
            writeln!(out, "{line}")?;
        }
        Ok(())
    }

    pub fn to_csv_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn last(&self) -> Option<&RecordRow> {
        self.rows.last()
    }
}
