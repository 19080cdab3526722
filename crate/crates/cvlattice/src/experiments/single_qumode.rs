use std::sync::Arc;

use cvlattice_core::gates::{apply_diagonal_step, build_potential_phase, build_rotation};
use cvlattice_core::oracle::ExactQumodeEvolver;
use cvlattice_core::wavefunction::displaced_ground_state;
use cvlattice_core::{FockBasisTable, QuadratureGrid};

use super::{grid_config, interaction, require, Experiment, RunError};
use crate::config::{ConfigError, ExperimentConfig};
use crate::output::{fmt_f64, Metrics, RunDir};

pub(super) struct SingleQumode;

/// Trotterized and exact densities of one anharmonic qumode at the requested times.
#[derive(Debug, Clone)]
pub struct SingleQumodeRun {
    pub grid: Arc<QuadratureGrid>,
    pub times: Vec<f64>,
    pub trotter: Vec<Vec<f64>>,
    pub exact: Vec<Vec<f64>>,
    /// `||rho_trotter - rho_exact|| / ||rho_exact||` per time.
    pub l2_error: Vec<f64>,
    /// Distance between the two density maxima, in quadrature units.
    pub peak_shift: Vec<f64>,
    pub max_norm_drift: f64,
}

pub fn run_single_qumode(cfg: &ExperimentConfig) -> Result<SingleQumodeRun, RunError> {
    let grid = Arc::new(grid_config(cfg).build().map_err(|e| ConfigError::Invalid(e.to_string()))?);
    let omega = require(&cfg.mass, "mass")?;
    let dt = require(&cfg.dt, "dt")?;
    let mut times = require(&cfg.times, "times")?;
    times.sort_by(f64::total_cmp);
    let inter = interaction(cfg, "cubic-quartic")?;
    let table = Arc::new(FockBasisTable::new(grid.clone(), omega, grid_config(cfg).l_trunc)?);
    let rotation = build_rotation(table, dt);
    let phase = build_potential_phase(&grid, |q| inter.value(q), dt)?;
    let oracle = ExactQumodeEvolver::new(grid.clone(), omega, |q| inter.value(q))?;
    let psi0 = displaced_ground_state(grid.clone(), omega, cfg.displacement.unwrap_or(0.0))?;

    let mut run = SingleQumodeRun {
        grid: grid.clone(),
        times: Vec::new(),
        trotter: Vec::new(),
        exact: Vec::new(),
        l2_error: Vec::new(),
        peak_shift: Vec::new(),
        max_norm_drift: 0.0,
    };
    let mut psi = psi0.clone();
    let mut done: u64 = 0;
    for &t in &times {
        let target = (t / dt).round() as u64;
        if ((target as f64) * dt - t).abs() > 1e-6 * t.max(1.0) {
            return Err(ConfigError::Invalid(format!("time {t} is not a whole number of steps of {dt}")).into());
        }
        while done < target {
            let (next, raw) = apply_diagonal_step(&psi, &rotation, &phase)?;
            if !raw.is_finite() {
                return Err(cvlattice_core::Error::NumericalFailure { step: done + 1 }.into());
            }
            run.max_norm_drift = run.max_norm_drift.max((raw - 1.0).abs());
            psi = next;
            done += 1;
        }
        let exact = if done == 0 { psi0.density() } else { oracle.evolve(&psi0, t)?.density() };
        let trotter = psi.density();
        let xi = grid.spacing();
        let diff: f64 = trotter.iter().zip(&exact).map(|(a, b)| (a - b).powi(2)).sum::<f64>() * xi;
        let scale: f64 = exact.iter().map(|b| b * b).sum::<f64>() * xi;
        run.l2_error.push((diff / scale).sqrt());
        run.peak_shift.push((grid.points()[argmax(&trotter)] - grid.points()[argmax(&exact)]).abs());
        run.times.push(t);
        run.trotter.push(trotter);
        run.exact.push(exact);
    }
    Ok(run)
}

fn argmax(v: &[f64]) -> usize {
    (0..v.len()).fold(0, |best, i| if v[i] > v[best] { i } else { best })
}

impl Experiment for SingleQumode {
    fn name(&self) -> &'static str {
        "single-qumode"
    }

    fn defaults(&self) -> ExperimentConfig {
        ExperimentConfig {
            mass: Some(1.0),
            dt: Some(0.01),
            potential: Some("cubic-quartic".into()),
            epsilon: Some(0.1),
            times: Some(vec![100.0, 200.0, 300.0, 400.0]),
            displacement: Some(0.0),
            ..Default::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &RunDir) -> Result<Metrics, RunError> {
        let run = run_single_qumode(cfg)?;
        let mut rows = Vec::new();
        for (k, &t) in run.times.iter().enumerate() {
            for (j, q) in run.grid.points().iter().enumerate() {
                rows.push(vec![fmt_f64(t), fmt_f64(*q), fmt_f64(run.trotter[k][j]), fmt_f64(run.exact[k][j])]);
            }
        }
        out.write_table("density.csv", &["t", "q", "trotter", "exact"], rows)?;
        let table = run.times.iter().zip(&run.l2_error).zip(&run.peak_shift);
        out.write_table(
            "discrepancy.csv",
            &["t", "l2_relative", "peak_shift"],
            table.map(|((t, e), p)| vec![fmt_f64(*t), fmt_f64(*e), fmt_f64(*p)]),
        )?;
        let mut m = Metrics::default();
        for (t, e) in run.times.iter().zip(&run.l2_error) {
            m.push(format!("l2_error_t{t}"), *e);
        }
        for (t, p) in run.times.iter().zip(&run.peak_shift) {
            m.push(format!("peak_shift_t{t}"), *p);
        }
        m.push("max_norm_drift", run.max_norm_drift);
        Ok(m)
    }
}
