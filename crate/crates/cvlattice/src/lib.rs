//! Experiment drivers, configuration and result files for the qumode lattice
//! emulator.

pub mod config;
pub mod experiments;
pub mod output;

pub use config::{ConfigError, ExperimentConfig, WavepacketConfig};
pub use experiments::{experiments, run_named, Experiment, RunError};
pub use output::{Metrics, RunDir};
