//! Closed-loop simulation, run records, metrics and experiment presets.

mod config;
mod engine;
mod metrics;
mod presets;
mod record;
mod state;

pub use config::{
    BodyConfig, ConvergenceConfig, Disturbance, GainConfig, InitialPose, ModeConfig,
    ReferenceConfig, Scenario, SimConfig, Trigger, CONFIG_SCHEMA_VERSION,
};
pub use engine::{closed_loop_deriv, run_closed_loop, run_scenario};
pub use metrics::{metrics, rotation_path_length, sustained_below, RunSummary};
pub use presets::{
    fig3_disturbance, following_completion_time, preset_by_name, preset_fig2, preset_fig2_named,
    preset_fig3, Fig2Variant, FAST_RATE, FIG3_NOMINAL_RATE, PRESET_NAMES, SLOW_RATE,
};
pub use record::{RecordRow, RunEvents, RunRecord, CSV_COLUMNS};
pub use state::{AugmentedDerivative, AugmentedState};
