//! Lattice state, Trotter stepping and the recording evolution loop.

use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{FockBasisTable, DEFAULT_L_TRUNC};
use crate::gates::{
    build_potential_phase, build_rotation, hop_truncations, renormalize_rows, HopContext, HopTruncation,
    PotentialPhase, RotationGate,
};
use crate::grid::QuadratureGrid;
use crate::observables::EnergyFunctional;
use crate::potential::{EffectivePotential, Interaction, Phi4};
use crate::wavefunction::{self, ground_state, QumodeWavefunction};

/// Quadrature discretization shared by every site.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub m_points: usize,
    pub extent: f64,
    pub l_trunc: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            m_points: 200,
            extent: 20.0,
            l_trunc: DEFAULT_L_TRUNC,
        }
    }
}

impl GridConfig {
    pub fn build(&self) -> Result<QuadratureGrid> {
        QuadratureGrid::new(self.m_points, self.extent)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationParams {
    pub n_sites: usize,
    pub spacing: f64,
    pub mass: f64,
    pub coupling: f64,
    pub dt: f64,
    pub total_time: f64,
    pub record_stride: u64,
    pub grid: GridConfig,
}

impl Default for SimulationParams {
    fn default() -> Self {
        Self {
            n_sites: 2,
            spacing: 1.0,
            mass: 1.0,
            coupling: 0.0,
            dt: 0.01,
            total_time: 0.0,
            record_stride: 100,
            grid: GridConfig::default(),
        }
    }
}

impl SimulationParams {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(invalid(format!("{name} must be positive, got {v}")))
            }
        };
        if self.n_sites < 2 {
            return Err(invalid(format!("n_sites must be at least 2, got {}", self.n_sites)));
        }
        positive("spacing", self.spacing)?;
        positive("mass", self.mass)?;
        positive("dt", self.dt)?;
        if !(self.coupling.is_finite() && self.coupling >= 0.0) {
            return Err(invalid(format!("coupling must be non-negative, got {}", self.coupling)));
        }
        if !(self.total_time.is_finite() && self.total_time >= 0.0) {
            return Err(invalid(format!("total_time must be non-negative, got {}", self.total_time)));
        }
        if self.record_stride == 0 {
            return Err(invalid("record_stride must be at least 1"));
        }
        if self.grid.m_points < 2 {
            return Err(invalid(format!("m_points must be at least 2, got {}", self.grid.m_points)));
        }
        positive("extent", self.grid.extent)?;
        self.n_steps().map(|_| ())
    }

    /// `total_time / dt`, which must be integral up to rounding.
    pub fn n_steps(&self) -> Result<u64> {
        let ratio = self.total_time / self.dt;
        let steps = ratio.round();
        if (ratio - steps).abs() > 1e-6 * ratio.max(1.0) {
            return Err(invalid(format!(
                "total_time {} is not a whole number of steps of {}",
                self.total_time, self.dt
            )));
        }
        Ok(steps as u64)
    }
}

/// Product state over a periodic chain: one wavefunction per site, stored as
/// a contiguous `n_sites x grid` block.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeState {
    grid: Arc<QuadratureGrid>,
    n_sites: usize,
    amplitudes: Vec<Complex64>,
    time: f64,
    steps: u64,
}

impl LatticeState {
    /// Every site in the oscillator ground state of frequency `omega`.
    pub fn vacuum(grid: Arc<QuadratureGrid>, n_sites: usize, omega: f64) -> Result<Self> {
        let psi = ground_state(grid, omega)?;
        Self::from_sites(vec![psi; n_sites])
    }

    pub fn from_sites(sites: Vec<QumodeWavefunction>) -> Result<Self> {
        let Some(first) = sites.first() else {
            return Err(invalid("a lattice needs at least one site"));
        };
        let grid = first.grid().clone();
        let mut amplitudes = Vec::with_capacity(sites.len() * grid.len());
        for s in &sites {
            if !s.grid().same_as(&grid) {
                return Err(Error::SizeMismatch {
                    expected: grid.len(),
                    actual: s.grid().len(),
                });
            }
            amplitudes.extend_from_slice(s.amplitudes());
        }
        Ok(Self {
            grid,
            n_sites: sites.len(),
            amplitudes,
            time: 0.0,
            steps: 0,
        })
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn steps(&self) -> u64 {
        self.steps
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn site(&self, n: usize) -> &[Complex64] {
        let m = self.grid.len();
        &self.amplitudes[n * m..(n + 1) * m]
    }

    pub fn site_wavefunction(&self, n: usize) -> QumodeWavefunction {
        QumodeWavefunction::new(self.grid.clone(), self.site(n).to_vec()).expect("stored sites are normalized")
    }

    pub fn sites(&self) -> Vec<QumodeWavefunction> {
        (0..self.n_sites).map(|n| self.site_wavefunction(n)).collect()
    }

    pub fn set_site(&mut self, n: usize, psi: &QumodeWavefunction) -> Result<()> {
        if n >= self.n_sites {
            return Err(Error::OutOfRange(format!("site {n} on a lattice of {}", self.n_sites)));
        }
        if !psi.grid().same_as(&self.grid) {
            return Err(Error::SizeMismatch {
                expected: self.grid.len(),
                actual: psi.grid().len(),
            });
        }
        let m = self.grid.len();
        self.amplitudes[n * m..(n + 1) * m].copy_from_slice(psi.amplitudes());
        Ok(())
    }

    /// Cyclic relabelling: site `n` moves to `n + shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let m = self.grid.len();
        let mut out = self.clone();
        for n in 0..self.n_sites {
            let to = (n + shift) % self.n_sites;
            out.amplitudes[to * m..(to + 1) * m].copy_from_slice(self.site(n));
        }
        out
    }

    /// Site `n` moves to `axis - n` (mod N).
    pub fn reflected(&self, axis: usize) -> Self {
        let m = self.grid.len();
        let mut out = self.clone();
        for n in 0..self.n_sites {
            let to = (axis + self.n_sites - n % self.n_sites) % self.n_sites;
            out.amplitudes[to * m..(to + 1) * m].copy_from_slice(self.site(n));
        }
        out
    }

    /// Largest pointwise amplitude difference over all sites.
    pub fn max_abs_diff(&self, other: &LatticeState) -> f64 {
        wavefunction::max_abs_diff(&self.amplitudes, &other.amplitudes)
    }

    /// Smallest per-site fidelity `|<a_n|b_n>|^2`.
    pub fn min_site_fidelity(&self, other: &LatticeState) -> f64 {
        (0..self.n_sites)
            .map(|n| self.site_wavefunction(n).fidelity(&other.site_wavefunction(n)))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Gates for one direction of time.
#[derive(Debug)]
struct StepGates {
    hop: Box<dyn HopTruncation>,
    potential: PotentialPhase,
    rotation: RotationGate,
}

/// Trotter stepper for a fixed parameter set.
///
/// A forward step applies the hop, then the diagonal potential phase, then the
/// harmonic rotation, renormalizing every site after each operator. The
/// reverse step undoes them in the opposite order with `-dt`.
#[derive(Debug)]
pub struct Simulator {
    params: SimulationParams,
    grid: Arc<QuadratureGrid>,
    table: Arc<FockBasisTable>,
    interaction: Arc<dyn Interaction>,
    hop_name: String,
    forward: StepGates,
    backward: StepGates,
    energy: EnergyFunctional,
}

impl Simulator {
    /// Quartic interaction with the circulant hop.
    pub fn new(params: SimulationParams) -> Result<Self> {
        let interaction = Arc::new(Phi4 {
            coupling: params.coupling,
        });
        Self::with_strategies(params, interaction, "circulant")
    }

    pub fn with_strategies(params: SimulationParams, interaction: Arc<dyn Interaction>, hop: &str) -> Result<Self> {
        params.validate()?;
        let grid = Arc::new(params.grid.build()?);
        let table = Arc::new(FockBasisTable::new(grid.clone(), params.mass, params.grid.l_trunc)?);
        let hop_ctor = hop_truncations().get(hop)?;
        let effective = EffectivePotential::new(params.spacing, interaction.clone());
        let gates = |dt: f64| -> Result<StepGates> {
            let ctx = HopContext {
                grid: grid.clone(),
                n_sites: params.n_sites,
                spacing: params.spacing,
                dt,
            };
            Ok(StepGates {
                hop: hop_ctor(&ctx)?,
                potential: build_potential_phase(&grid, |q| effective.value(q), dt)?,
                rotation: build_rotation(table.clone(), dt),
            })
        };
        let forward = gates(params.dt)?;
        let backward = gates(-params.dt)?;
        let energy = EnergyFunctional::new(grid.clone(), params.mass, params.spacing, interaction.clone());
        Ok(Self {
            params,
            grid,
            table,
            interaction,
            hop_name: hop.to_string(),
            forward,
            backward,
            energy,
        })
    }

    pub fn params(&self) -> &SimulationParams {
        &self.params
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn fock_table(&self) -> &Arc<FockBasisTable> {
        &self.table
    }

    pub fn interaction(&self) -> &Arc<dyn Interaction> {
        &self.interaction
    }

    pub fn hop_name(&self) -> &str {
        &self.hop_name
    }

    pub fn energy(&self) -> &EnergyFunctional {
        &self.energy
    }

    pub fn vacuum(&self) -> Result<LatticeState> {
        LatticeState::vacuum(self.grid.clone(), self.params.n_sites, self.params.mass)
    }

    fn check(&self, state: &LatticeState) -> Result<()> {
        if state.n_sites != self.params.n_sites {
            return Err(Error::SizeMismatch {
                expected: self.params.n_sites,
                actual: state.n_sites,
            });
        }
        if !state.grid.same_as(&self.grid) {
            return Err(Error::SizeMismatch {
                expected: self.grid.len(),
                actual: state.grid.len(),
            });
        }
        Ok(())
    }

    /// One forward step. Returns the largest per-site norm drift seen before
    /// any of the three renormalizations.
    pub fn step(&self, state: &mut LatticeState) -> Result<f64> {
        self.check(state)?;
        let g = &self.forward;
        let amps = &mut state.amplitudes;
        g.hop.apply(amps);
        let mut drift = renormalize_rows(&self.grid, amps);
        g.potential.apply_rows(amps);
        drift = nan_max(drift, renormalize_rows(&self.grid, amps));
        g.rotation.apply_rows(amps);
        drift = nan_max(drift, renormalize_rows(&self.grid, amps));
        state.steps += 1;
        state.time = state.steps as f64 * self.params.dt;
        if drift.is_nan() {
            return Err(Error::NumericalFailure { step: state.steps });
        }
        Ok(drift)
    }

    /// Inverse of [`Simulator::step`] up to truncation and renormalization.
    pub fn step_reverse(&self, state: &mut LatticeState) -> Result<f64> {
        self.check(state)?;
        let g = &self.backward;
        let amps = &mut state.amplitudes;
        g.rotation.apply_rows(amps);
        let mut drift = renormalize_rows(&self.grid, amps);
        g.potential.apply_rows(amps);
        drift = nan_max(drift, renormalize_rows(&self.grid, amps));
        g.hop.apply(amps);
        drift = nan_max(drift, renormalize_rows(&self.grid, amps));
        state.steps = state.steps.saturating_sub(1);
        state.time = state.steps as f64 * self.params.dt;
        if drift.is_nan() {
            return Err(Error::NumericalFailure { step: state.steps });
        }
        Ok(drift)
    }

    /// Runs `params.total_time / params.dt` steps, recording observables every
    /// `record_stride` steps and after the final step.
    pub fn evolve(&self, state: &mut LatticeState) -> Result<ObservableSeries> {
        self.evolve_with(state, |_, _| {})
    }

    /// As [`Simulator::evolve`], calling `on_record` with each recorded state.
    pub fn evolve_with(
        &self,
        state: &mut LatticeState,
        mut on_record: impl FnMut(&LatticeState, &ObservableSeries),
    ) -> Result<ObservableSeries> {
        self.check(state)?;
        let n_steps = self.params.n_steps()?;
        let stride = self.params.record_stride;
        let mut series = ObservableSeries::default();
        series.record(state, &self.energy, 0.0);
        on_record(state, &series);
        let mut drift: f64 = 0.0;
        for k in 1..=n_steps {
            drift = drift.max(self.step(state)?);
            if k % stride == 0 || k == n_steps {
                series.record(state, &self.energy, drift);
                on_record(state, &series);
                drift = 0.0;
            }
        }
        log::debug!(
            "evolved {} steps, largest recorded drift {:.3e}",
            n_steps,
            series.norm_drift.iter().copied().fold(0.0, f64::max)
        );
        Ok(series)
    }
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

/// Snapshots of lattice observables.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ObservableSeries {
    pub times: Vec<f64>,
    /// `<q_n>` per snapshot.
    pub field_vev: Vec<Vec<f64>>,
    pub energy_density: Vec<Vec<f64>>,
    pub total_energy: Vec<f64>,
    /// Largest per-site norm drift over the steps since the previous snapshot.
    pub norm_drift: Vec<f64>,
}

impl ObservableSeries {
    pub fn record(&mut self, state: &LatticeState, energy: &EnergyFunctional, drift: f64) {
        let density = energy.energy_density(state);
        self.times.push(state.time());
        self.field_vev.push(crate::observables::field_expectation(state));
        self.total_energy.push(density.iter().sum());
        self.energy_density.push(density);
        self.norm_drift.push(drift);
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|E(t) - E(0)| / |E(0)|`.
    pub fn relative_energy_drift(&self) -> f64 {
        let Some(&e0) = self.total_energy.first() else {
            return 0.0;
        };
        self.total_energy.iter().map(|e| ((e - e0) / e0).abs()).fold(0.0, f64::max)
    }
}
