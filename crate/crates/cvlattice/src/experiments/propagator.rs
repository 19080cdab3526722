use cvlattice_core::oracle::retarded_propagator;
use cvlattice_core::state_prep::delta_impulse;
use cvlattice_core::ObservableSeries;

use super::{max_of, require, simulator, snapshot_count, Experiment, RunError};
use crate::config::ExperimentConfig;
use crate::output::{fmt_f64, Metrics, PsiWriter, RunDir};

pub(super) struct Propagator;

/// Light-cone band, in lattice units, excluded from both checks.
const CONE_BAND: f64 = 3.0;

#[derive(Debug, Clone)]
pub struct PropagatorRun {
    pub series: ObservableSeries,
    pub impulse_site: usize,
    pub amplitude: f64,
    pub mass: f64,
    pub spacing: f64,
    /// Largest `|<q_n>|` with `|n - n0| a > t + 3a`, divided by the impulse amplitude.
    pub causality_leak: f64,
    /// Pearson correlation of `<q_{n0}>(t)` with `D_R(0, t)` for `t >= 3a`.
    pub slice_correlation: f64,
}

pub fn run_propagator(cfg: &ExperimentConfig) -> Result<PropagatorRun, RunError> {
    run_propagator_with(cfg, |_, _| Ok(()))
}

fn run_propagator_with(
    cfg: &ExperimentConfig,
    mut on_record: impl FnMut(&cvlattice_core::LatticeState, usize) -> std::io::Result<()>,
) -> Result<PropagatorRun, RunError> {
    let sim = simulator(cfg)?;
    let p = sim.params().clone();
    let amplitude = require(&cfg.impulse_amplitude, "impulse_amplitude")?;
    let site = cfg.impulse_site.unwrap_or(p.n_sites / 2);
    let mut state = delta_impulse(sim.grid().clone(), p.n_sites, p.mass, site, amplitude)
        .map_err(|e| crate::config::ConfigError::Invalid(e.to_string()))?;
    let mut io_err = None;
    let series = sim.evolve_with(&mut state, |s, series| {
        if io_err.is_none() {
            io_err = on_record(s, series.len()).err();
        }
    })?;
    if let Some(e) = io_err {
        return Err(e.into());
    }

    let mut leak: f64 = 0.0;
    for (t, row) in series.times.iter().zip(&series.field_vev) {
        for (n, v) in row.iter().enumerate() {
            let dist = lattice_distance(n, site, p.n_sites) as f64 * p.spacing;
            if dist > t + CONE_BAND * p.spacing {
                leak = leak.max(v.abs());
            }
        }
    }
    let causality_leak = if amplitude == 0.0 { leak } else { leak / amplitude.abs() };
    let (slice, reference): (Vec<f64>, Vec<f64>) = series
        .times
        .iter()
        .zip(&series.field_vev)
        .filter(|(t, _)| **t >= CONE_BAND * p.spacing)
        .map(|(t, row)| (row[site], retarded_propagator(p.mass, 0.0, *t)))
        .unzip();
    Ok(PropagatorRun {
        series,
        impulse_site: site,
        amplitude,
        mass: p.mass,
        spacing: p.spacing,
        causality_leak,
        slice_correlation: pearson(&slice, &reference),
    })
}

fn lattice_distance(a: usize, b: usize, n: usize) -> usize {
    let d = a.abs_diff(b);
    d.min(n - d)
}

/// Sample Pearson correlation; `NaN` when either input is constant.
pub fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len().min(y.len()) as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        sxy += (a - mx) * (b - my);
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
    }
    sxy / (sxx * syy).sqrt()
}

impl Experiment for Propagator {
    fn name(&self) -> &'static str {
        "propagator"
    }

    fn defaults(&self) -> ExperimentConfig {
        ExperimentConfig {
            n_sites: Some(200),
            mass: Some(1.0),
            coupling: Some(0.0),
            dt: Some(0.01),
            total_time: Some(80.0),
            record_stride: Some(10),
            impulse_amplitude: Some(1.0),
            write_psi: Some(false),
            ..Default::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &RunDir) -> Result<Metrics, RunError> {
        let mut psi = None;
        if cfg.write_psi == Some(true) {
            let p = super::sim_params(cfg)?;
            let count = snapshot_count(p.n_steps()?, p.record_stride);
            psi = Some(PsiWriter::create(&out.file("psi.raw"), p.n_sites, p.grid.m_points, count)?);
        }
        let run = run_propagator_with(cfg, |s, _| match psi.as_mut() {
            Some(w) => w.write_snapshot(s.amplitudes()),
            None => Ok(()),
        })?;
        if let Some(w) = psi {
            w.finish()?;
        }
        out.write_series(&run.series)?;
        let rows = run.series.times.iter().zip(&run.series.field_vev).map(|(t, row)| {
            vec![
                fmt_f64(*t),
                fmt_f64(row[run.impulse_site]),
                fmt_f64(retarded_propagator(run.mass, 0.0, *t)),
            ]
        });
        out.write_table("slice.csv", &["t", "field", "propagator"], rows)?;
        let mut m = Metrics::default();
        m.push("causality_leak", run.causality_leak);
        m.push("slice_correlation", run.slice_correlation);
        m.push("max_norm_drift", max_of(&run.series.norm_drift));
        Ok(m)
    }
}
