//! Experiment plumbing: TOML configs, seed sweeps over a worker pool, and the
//! trajectory CSV / `summary.json` outputs.
//!
//! A config names one model, one chain and a list of `gamma` (and `beta`)
//! values; every value combination times every seed is a cell. Cells run in
//! parallel and are merged in config order, so output never depends on the
//! thread count.

pub mod config;
mod exec;
mod presets;
mod summary;

pub use config::{
    ChainName, ExperimentConfig, InitName, LandscapeMode, Model, SeedSpec, Verb, CONFIG_VERSION, DEFAULT_OUT_DIR,
    OUT_DIR_ENV, SWEEP_PARAMS,
};
pub use exec::{execute, resolve_out_dir, Artifact, Execution, Report, SUMMARY_FILE, SWEEP_CSV_HEADER};
pub use presets::{preset, PRESETS};
pub use summary::{aggregate, median, CellAggregate, RunSummary, SeedRow};
