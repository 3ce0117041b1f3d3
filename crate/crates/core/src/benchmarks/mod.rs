//! Episode recording, the pushing and trajectory metric suites, the seeded
//! benchmark runner and the step-time scalability sweep.

mod metrics;
mod record;
mod runner;
mod sweep;

pub use metrics::{
    collision_onsets, completion_steps, compute_push_metrics, compute_traj_metrics, count_corrections, makespan,
    process_time, push_series, push_throughput, smoothness, success_rate, traj_throughput, MetricsConfig, MetricsError,
    MetricsReport, PushMetrics, TrajMetrics, WALL_TIME_FIELDS,
};
pub use record::{EpisodeRecord, StepRecord};
pub use runner::{run_benchmark, run_episode, Baseline};
pub use sweep::{scalability_sweep, time_point, TimingRow, TimingTable, DEFAULT_SWEEP, DEFAULT_SWEEP_STEPS};
