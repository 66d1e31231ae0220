//! Configuration, experiment orchestration and CSV artifacts for
//! `stable-sde-core`.
//!
//! [`run_experiment`] takes a validated [`ExperimentConfig`], runs its
//! replicates through any [`Replicator`](stable_sde_core::Replicator) and
//! writes plot-ready CSV files plus a `summary.csv` with one row per check.

pub mod config;
pub mod experiments;
pub mod output;
pub mod parallel;

pub use config::{ConfigError, Experiment, ExperimentConfig};
pub use experiments::{run_experiment, Check, CheckKind, LabError, Outcome};
pub use parallel::RayonReplicator;
