use std::sync::Arc;

use cvlattice_core::oracle::{FewSiteSystem, FEW_SITE_DIMENSION_LIMIT};
use cvlattice_core::wavefunction::displaced_ground_state;
use cvlattice_core::{FockBasisTable, LatticeState, QuadratureGrid, SimulationParams, Simulator};
use num_complex::Complex64;

use super::{hop_name, interaction, require, sim_params, Experiment, RunError};
use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_f64, Metrics, RunDir};

pub(super) struct OracleCompare;

/// Number of successive step halvings compared against the oracle.
const HALVINGS: u32 = 2;
/// Largest dimension for the doubled-cutoff convergence check.
const CONVERGENCE_DIMENSION: usize = 4_000;

#[derive(Debug, Clone)]
pub struct OracleCompareRun {
    pub grid: Arc<QuadratureGrid>,
    /// Exact reduced density per site.
    pub exact: Vec<Vec<f64>>,
    /// Simulated density per site at the base step.
    pub simulated: Vec<Vec<f64>>,
    /// Step sizes and per-site L2 density distance at each.
    pub distances: Vec<(f64, Vec<f64>)>,
    /// Per-site `<psi_sim|rho_exact|psi_sim>` at the base step.
    pub fidelity: Vec<f64>,
    /// L2 change of the exact densities when the Fock cutoff doubles, if affordable.
    pub cutoff_change: Option<Vec<f64>>,
}

type ExactRun = (FewSiteSystem, Vec<Complex64>, Vec<Vec<f64>>);

pub fn run_oracle_compare(cfg: &ExperimentConfig) -> Result<OracleCompareRun, RunError> {
    let base = sim_params(cfg)?;
    if base.n_sites > 3 {
        return Err(ConfigError::Invalid(format!("oracle-compare supports at most 3 sites, got {}", base.n_sites)).into());
    }
    let cutoff = require(&cfg.fock_cutoff, "fock_cutoff")?;
    let d = require(&cfg.displacement, "displacement")?;
    let mut displacements = vec![0.0; base.n_sites];
    displacements[0] = d;

    let exact_densities = |cutoff: usize, grid: &Arc<QuadratureGrid>| -> Result<ExactRun, RunError> {
        let sys = FewSiteSystem::new(base.n_sites, base.spacing, base.mass, base.coupling, cutoff)
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let psi = sys.evolve(&sys.coherent_product(&displacements)?, base.total_time)?;
        let dens = (0..base.n_sites)
            .map(|s| sys.site_density(grid.clone(), &psi, s))
            .collect::<Result<_, _>>()?;
        Ok((sys, psi, dens))
    };

    let mut distances = Vec::new();
    let mut simulated = Vec::new();
    let mut fidelity = Vec::new();
    let mut grid = None;
    let mut exact = Vec::new();
    for h in 0..=HALVINGS {
        let params = SimulationParams {
            dt: base.dt / f64::from(1u32 << h),
            record_stride: u64::MAX,
            ..base.clone()
        };
        let sim = Simulator::with_strategies(params, interaction(cfg, "phi4")?, hop_name(cfg))
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let g = sim.grid().clone();
        let sites = displacements
            .iter()
            .map(|&x| displaced_ground_state(g.clone(), base.mass, x))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| ConfigError::Invalid(e.to_string()))?;
        let mut state = LatticeState::from_sites(sites)?;
        for _ in 0..sim.params().n_steps()? {
            sim.step(&mut state)?;
        }
        if h == 0 {
            let (sys, psi, dens) = exact_densities(cutoff, &g)?;
            let table = FockBasisTable::new(g.clone(), base.mass, cutoff)?;
            for s in 0..base.n_sites {
                let c = table.decompose(&state.site_wavefunction(s))?;
                let rho = sys.reduced_density(&psi, s);
                let lv = cutoff + 1;
                let mut f = Complex64::default();
                for l in 0..lv {
                    for lp in 0..lv {
                        f += c[l].conj() * rho[l * lv + lp] * c[lp];
                    }
                }
                fidelity.push(f.re);
            }
            exact = dens;
            simulated = (0..base.n_sites).map(|s| state.site_wavefunction(s).density()).collect();
            grid = Some(g.clone());
        }
        let xi = g.spacing();
        let per_site = (0..base.n_sites)
            .map(|s| {
                let sim_d = state.site_wavefunction(s).density();
                (xi * sim_d.iter().zip(&exact[s]).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sqrt()
            })
            .collect();
        distances.push((sim.params().dt, per_site));
    }
    let grid = grid.expect("at least one step size ran");

    let doubled = 2 * cutoff;
    let dim = (doubled + 1).checked_pow(base.n_sites as u32);
    let cutoff_change = match dim {
        Some(dim) if dim <= CONVERGENCE_DIMENSION.min(FEW_SITE_DIMENSION_LIMIT) => {
            let (_, _, fine) = exact_densities(doubled, &grid)?;
            let xi = grid.spacing();
            Some(
                (0..base.n_sites)
                    .map(|s| (xi * fine[s].iter().zip(&exact[s]).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).sqrt())
                    .collect(),
            )
        }
        _ => {
            log::info!("skipping cutoff-doubling check: dimension too large");
            None
        }
    };
    Ok(OracleCompareRun {
        grid,
        exact,
        simulated,
        distances,
        fidelity,
        cutoff_change,
    })
}

impl Experiment for OracleCompare {
    fn name(&self) -> &'static str {
        "oracle-compare"
    }

    fn defaults(&self) -> ExperimentConfig {
        ExperimentConfig {
            n_sites: Some(2),
            spacing: Some(1.0),
            mass: Some(1.0),
            coupling: Some(0.0),
            dt: Some(0.01),
            total_time: Some(1.0),
            displacement: Some(1.0),
            fock_cutoff: Some(12),
            ..Default::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &RunDir) -> Result<Metrics, RunError> {
        let run = run_oracle_compare(cfg)?;
        let mut rows = Vec::new();
        for s in 0..run.exact.len() {
            for (j, q) in run.grid.points().iter().enumerate() {
                rows.push(vec![s.to_string(), fmt_f64(*q), fmt_f64(run.exact[s][j]), fmt_f64(run.simulated[s][j])]);
            }
        }
        out.write_table("density.csv", &["site", "q", "exact", "simulated"], rows)?;
        let mut table = Vec::new();
        let mut m = Metrics::default();
        for (dt, per_site) in &run.distances {
            for (s, v) in per_site.iter().enumerate() {
                table.push(vec![fmt_f64(*dt), s.to_string(), fmt_f64(*v)]);
                m.push(format!("l2_site{s}_dt{dt}"), *v);
            }
        }
        out.write_table("distance.csv", &["dt", "site", "l2_distance"], table)?;
        for (s, f) in run.fidelity.iter().enumerate() {
            m.push(format!("fidelity_site{s}"), *f);
        }
        if let Some(change) = &run.cutoff_change {
            for (s, v) in change.iter().enumerate() {
                m.push(format!("cutoff_change_site{s}"), *v);
            }
        }
        Ok(m)
    }
}
