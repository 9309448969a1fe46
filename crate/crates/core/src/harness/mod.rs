//! Experiment runner: declarative configs in, CSV trajectories and
//! metadata out.

pub mod build;
pub mod config;
pub mod output;
mod run;

pub use config::{
    ClusterSpec, ExperimentConfig, GenerateSpec, InstanceSpec, Options, OracleKind, OracleSpec, PolicySpec,
};
pub use output::{checkpoints, fmt_num, AggregateRow, TrajectoryRecord, AGGREGATE_HEADER, TRAJECTORY_HEADER};
pub use run::{
    aggregate, bound_rows, default_bounds, evaluate_bound, prepare, run_all, run_bounds, run_experiment, simulate,
    sweep, trajectory_path, with_axis, ExperimentSummary, Prepared, ProfileSummary, RewardTable, RunState, RunSummary,
    SweepEntry,
};
