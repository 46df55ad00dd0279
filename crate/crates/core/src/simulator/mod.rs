//! Monte Carlo experiment driver: cache-size sweeps, per-trial delivery,
//! min-with-LFU reporting and CSV output.

mod config;
mod run;

pub use config::{parse_config, DemandSpec, ExperimentConfig, PlacementPolicy, Scheme, KEYS};
pub use run::{
    lfu_rate, run_experiment, Experiment, Point, PointSummary, SchemeOutcome, TrialResult,
    CSV_HEADER,
};
