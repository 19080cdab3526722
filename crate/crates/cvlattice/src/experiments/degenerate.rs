use cvlattice_core::gates::{apply_diagonal_step, build_potential_phase, build_rotation};
use cvlattice_core::wavefunction::displaced_ground_state;
use cvlattice_core::{LatticeState, ObservableSeries};

use super::{interaction, max_of, require, simulator, Experiment, RunError};
use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_f64, Metrics, RunDir};

pub(super) struct DegenerateCheck;

#[derive(Debug, Clone)]
pub struct DegenerateRun {
    pub series: ObservableSeries,
    /// `(t, max inter-site deviation, max deviation from the single qumode)` per record after t = 0.
    pub deviations: Vec<(f64, f64, f64)>,
    pub max_inter_site: f64,
    pub max_vs_single: f64,
}

/// Evolves a lattice of identical sites next to one qumode driven only by the
/// interaction, in lockstep, and tracks how far they separate.
pub fn run_degenerate(cfg: &ExperimentConfig) -> Result<DegenerateRun, RunError> {
    let sim = simulator(cfg)?;
    let p = sim.params().clone();
    let n_steps = p.n_steps()?;
    let d = require(&cfg.displacement, "displacement")?;
    let psi0 = displaced_ground_state(sim.grid().clone(), p.mass, d).map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let mut lattice = LatticeState::from_sites(vec![psi0.clone(); p.n_sites])?;
    let inter = interaction(cfg, "phi4")?;
    let rotation = build_rotation(sim.fock_table().clone(), p.dt);
    let phase = build_potential_phase(sim.grid(), |q| inter.value(q), p.dt)?;
    let mut single = psi0;

    let mut series = ObservableSeries::default();
    series.record(&lattice, sim.energy(), 0.0);
    let mut deviations = Vec::new();
    let mut drift: f64 = 0.0;
    let (mut max_inter, mut max_single) = (0.0f64, 0.0f64);
    for k in 1..=n_steps {
        drift = drift.max(sim.step(&mut lattice)?);
        single = apply_diagonal_step(&single, &rotation, &phase)?.0;
        if k % p.record_stride == 0 || k == n_steps {
            let reference = lattice.site_wavefunction(0);
            let inter_site = (1..p.n_sites)
                .map(|n| lattice.site_wavefunction(n).max_abs_diff(&reference))
                .fold(0.0, f64::max);
            let vs_single = (0..p.n_sites)
                .map(|n| lattice.site_wavefunction(n).max_abs_diff(&single))
                .fold(0.0, f64::max);
            max_inter = max_inter.max(inter_site);
            max_single = max_single.max(vs_single);
            deviations.push((lattice.time(), inter_site, vs_single));
            series.record(&lattice, sim.energy(), drift);
            drift = 0.0;
        }
    }
    Ok(DegenerateRun {
        series,
        deviations,
        max_inter_site: max_inter,
        max_vs_single: max_single,
    })
}

impl Experiment for DegenerateCheck {
    fn name(&self) -> &'static str {
        "degenerate-check"
    }

    fn defaults(&self) -> ExperimentConfig {
        ExperimentConfig {
            n_sites: Some(32),
            mass: Some(1.0),
            coupling: Some(0.8),
            dt: Some(0.01),
            total_time: Some(100.0),
            record_stride: Some(100),
            displacement: Some(1.0),
            ..Default::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &RunDir) -> Result<Metrics, RunError> {
        let run = run_degenerate(cfg)?;
        out.write_series(&run.series)?;
        out.write_table(
            "deviation.csv",
            &["t", "inter_site", "vs_single"],
            run.deviations.iter().map(|(t, a, b)| vec![fmt_f64(*t), fmt_f64(*a), fmt_f64(*b)]),
        )?;
        let mut m = Metrics::default();
        m.push("max_inter_site_deviation", run.max_inter_site);
        m.push("max_single_qumode_deviation", run.max_vs_single);
        m.push("max_norm_drift", max_of(&run.series.norm_drift));
        Ok(m)
    }
}
