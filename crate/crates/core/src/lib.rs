//! Fog network formation: latency models, min-max task distribution and
//! online neighbor selection, with the Monte Carlo experiments built on
//! top of them.
//!
//! A fog node receiving `x_i` packets/s splits them between its own
//! processor, a cloud server behind a cellular link, and up to `J`
//! neighboring fog nodes. Every path is a chain of M/D/1 queues
//! ([`queueing`]); [`solver`] finds the split that minimizes the worst
//! path delay, [`oracle`] checks it by brute force, and [`selection`]
//! decides which arriving neighbors to recruit.

// `!(x > 0.0)` is used on purpose: it also rejects NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod experiments;
pub mod manifest;
pub mod oracle;
pub mod queueing;
pub mod scenario;
pub mod selection;
pub mod solver;
pub mod table;

pub use config::{load_config, parse_config, LinkMode, Override, ScenarioConfig};
pub use error::{Error, QueueKind, Result};
pub use experiments::{choose_j, run_experiment, Experiment};
pub use oracle::{grid_oracle, grid_search, GridOptimum};
pub use queueing::{
    channel_gain, comp_delay_cloud, comp_delay_fog, md1_wait, path_delay, service_rate, tx_delay, CloudLink,
    ComputeProfile, FogLink, Path, PathKind, Position, RadioParams,
};
pub use selection::{
    competitive_ratio, offline_top_j, online_secretary, score, FogCandidate, SecretaryParams, SelectionOutcome,
    StreamEnd, ThresholdSet,
};
pub use solver::{
    load_for_delay, max_path_delay, solve_distribution, total_cost, NodeSet, SolveReport, TaskDistribution,
};
pub use table::{Cell, Table};
