//! Experiment harness: configuration files, figure presets, the experiment
//! runner with deterministic parallel replication, and CSV persistence.

mod config;
mod experiment;

pub use config::{
    load_config, parse_config, preset, ConfigError, ExperimentConfig, ModelConfig, OutputConfig,
    OutputFormat, RunConfig, SimConfig, DEFAULT_SEED, PRESET_NAMES,
};
pub use experiment::{
    constants_report, run_experiment, write_csv, ConstantsRow, ExperimentOutcome, HarnessError,
    ResultRow, RunFailure, RunOptions, CSV_HEADER,
};

use crate::dists::RngStream;

/// Deterministic replication stream for (master seed, replication index).
/// Distinct indices give independent streams; identical inputs reproduce the
/// identical draw sequence regardless of thread count.
pub fn rng_substream(master_seed: u64, replication_index: u64) -> RngStream {
    RngStream::substream(master_seed, replication_index)
}

/// Environment variable that overrides the `--workers` flag.
pub const WORKERS_ENV: &str = "RUINSIM_WORKERS";

/// Worker-count resolution: the environment variable wins over the flag.
pub fn resolve_workers(flag: Option<usize>) -> Option<usize> {
    match std::env::var(WORKERS_ENV) {
        Ok(v) => v.trim().parse::<usize>().ok().filter(|w| *w > 0).or(flag),
        Err(_) => flag,
    }
}
