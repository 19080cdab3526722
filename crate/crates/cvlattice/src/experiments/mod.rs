//! Experiment drivers, selected by name at run time.

pub mod degenerate;
pub mod oracle_compare;
pub mod propagator;
pub mod scattering;
pub mod single_qumode;

use std::io;
use std::path::PathBuf;
use std::sync::Arc;

use cvlattice_core::potential::interactions;
use cvlattice_core::{Error as CoreError, GridConfig, Interaction, InteractionParams, Registry, SimulationParams};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{Metrics, RunDir};

pub use degenerate::{run_degenerate, DegenerateRun};
pub use oracle_compare::{run_oracle_compare, OracleCompareRun};
pub use propagator::{pearson, run_propagator, PropagatorRun};
pub use scattering::{linear_slope, run_scattering, ScatteringRun};
pub use single_qumode::{run_single_qumode, SingleQumodeRun};

#[derive(Debug, Error)]
pub enum RunError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Physics(#[from] CoreError),
    #[error("i/o failure: {0}")]
    Io(#[from] io::Error),
}

impl RunError {
    /// 2 for bad configuration, 3 for a non-finite state, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            RunError::Config(_) => 2,
            RunError::Physics(CoreError::NumericalFailure { .. }) => 3,
            RunError::Physics(CoreError::Diagonalization(_)) => 1,
            RunError::Physics(_) => 2,
            RunError::Io(_) => 1,
        }
    }
}

pub trait Experiment: Send + Sync {
    fn name(&self) -> &'static str;

    /// Defaults applied underneath the user's configuration.
    fn defaults(&self) -> ExperimentConfig;

    /// Computes, writes the experiment's files into `out`, and returns its metrics.
    fn run(&self, cfg: &ExperimentConfig, out: &RunDir) -> Result<Metrics, RunError>;
}

pub type ExperimentCtor = fn() -> Box<dyn Experiment>;

pub fn experiments() -> Registry<ExperimentCtor> {
    Registry::<ExperimentCtor>::new("experiment")
        .register("single-qumode", || Box::new(single_qumode::SingleQumode))
        .register("propagator", || Box::new(propagator::Propagator))
        .register("scattering", || Box::new(scattering::Scattering))
        .register("degenerate-check", || Box::new(degenerate::DegenerateCheck))
        .register("oracle-compare", || Box::new(oracle_compare::OracleCompare))
}

/// Fills every unset field of `cfg` from `base`.
pub fn with_defaults(cfg: &ExperimentConfig, base: ExperimentConfig) -> ExperimentConfig {
    macro_rules! pick {
        ($($f:ident),*) => {
            ExperimentConfig {
                $($f: cfg.$f.clone().or(base.$f),)*
                wavepacket: if cfg.wavepacket.is_empty() { base.wavepacket } else { cfg.wavepacket.clone() },
            }
        };
    }
    pick!(
        experiment, output_dir, seed, threads, n_sites, spacing, mass, coupling, dt, total_time, record_stride,
        m_points, extent, l_trunc, hop, potential, epsilon, impulse_amplitude, impulse_site, times, displacement,
        fock_cutoff, write_psi
    )
}

/// Resolves, runs and records one experiment. Returns the run directory and metrics.
pub fn run_named(name: &str, cfg: &ExperimentConfig) -> Result<(RunDir, Metrics), RunError> {
    let ctor = experiments().get(name).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let exp = ctor();
    if let Some(declared) = &cfg.experiment {
        if declared != name {
            return Err(ConfigError::Invalid(format!("config declares experiment '{declared}' but '{name}' was requested")).into());
        }
    }
    let mut resolved = with_defaults(cfg, exp.defaults());
    resolved.experiment = Some(name.to_string());
    resolved.validate()?;
    let dir = resolved.output_dir.clone().unwrap_or_else(|| PathBuf::from("runs").join(name));
    let out = RunDir::create(dir)?;
    out.write_config_echo(&resolved)?;
    let metrics = exp.run(&resolved, &out)?;
    out.write_metrics(&metrics)?;
    Ok((out, metrics))
}

pub(crate) fn require<T: Clone>(v: &Option<T>, key: &str) -> Result<T, ConfigError> {
    v.clone().ok_or_else(|| ConfigError::Invalid(format!("missing key '{key}'")))
}

pub(crate) fn grid_config(cfg: &ExperimentConfig) -> GridConfig {
    let d = GridConfig::default();
    GridConfig {
        m_points: cfg.m_points.unwrap_or(d.m_points),
        extent: cfg.extent.unwrap_or(d.extent),
        l_trunc: cfg.l_trunc.unwrap_or(d.l_trunc),
    }
}

pub(crate) fn sim_params(cfg: &ExperimentConfig) -> Result<SimulationParams, RunError> {
    let p = SimulationParams {
        n_sites: require(&cfg.n_sites, "n_sites")?,
        spacing: cfg.spacing.unwrap_or(1.0),
        mass: require(&cfg.mass, "mass")?,
        coupling: cfg.coupling.unwrap_or(0.0),
        dt: require(&cfg.dt, "dt")?,
        total_time: require(&cfg.total_time, "total_time")?,
        record_stride: cfg.record_stride.unwrap_or(100),
        grid: grid_config(cfg),
    };
    p.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(p)
}

pub(crate) fn interaction(cfg: &ExperimentConfig, default: &str) -> Result<Arc<dyn Interaction>, RunError> {
    let name = cfg.potential.as_deref().unwrap_or(default);
    let ctor = interactions().get(name).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    Ok(ctor(&InteractionParams {
        coupling: cfg.coupling.unwrap_or(0.0),
        epsilon: cfg.epsilon.unwrap_or(0.0),
    }))
}

pub(crate) fn hop_name(cfg: &ExperimentConfig) -> &str {
    cfg.hop.as_deref().unwrap_or("circulant")
}

/// Builds a simulator, mapping construction errors on user input to config errors.
pub(crate) fn simulator(cfg: &ExperimentConfig) -> Result<cvlattice_core::Simulator, RunError> {
    let params = sim_params(cfg)?;
    let inter = interaction(cfg, "phi4")?;
    cvlattice_core::Simulator::with_strategies(params, inter, hop_name(cfg)).map_err(|e| match e {
        CoreError::UnknownStrategy { .. } | CoreError::InvalidArgument(_) => ConfigError::Invalid(e.to_string()).into(),
        other => other.into(),
    })
}

/// Number of snapshots `evolve` records.
pub(crate) fn snapshot_count(n_steps: u64, stride: u64) -> usize {
    1 + n_steps.div_ceil(stride) as usize
}

pub(crate) fn max_of(values: &[f64]) -> f64 {
    values.iter().copied().fold(0.0, f64::max)
}
