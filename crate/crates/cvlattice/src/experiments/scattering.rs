use cvlattice_core::state_prep::{gaussian_wavepacket, two_wavepackets};
use cvlattice_core::{ObservableSeries, WavepacketSpec};

use super::{max_of, simulator, Experiment, RunError};
use crate::config::{ConfigError, ExperimentConfig, WavepacketConfig};
use crate::output::{fmt_f64, Metrics, RunDir};

pub(super) struct Scattering;

/// Latest time used for the two-packet centroid fits, before the packets meet.
const TWO_PACKET_FIT_TIME: f64 = 50.0;
/// Half-width, in sites, of the central window for the collision metric.
const COLLISION_HALF_WINDOW: usize = 3;

#[derive(Debug, Clone)]
pub struct ScatteringRun {
    pub series: ObservableSeries,
    pub packets: Vec<WavepacketSpec>,
    /// Per snapshot: field-squared centroid of each packet's half of the lattice
    /// (the whole lattice for a single packet).
    pub centroids: Vec<Vec<f64>>,
    /// Fitted centroid velocity per packet.
    pub speeds: Vec<f64>,
    /// Time of the largest mean energy density near the centre (two packets only).
    pub collision_time: Option<f64>,
    pub energy_drift: f64,
}

pub fn run_scattering(cfg: &ExperimentConfig) -> Result<ScatteringRun, RunError> {
    let sim = simulator(cfg)?;
    let p = sim.params().clone();
    let packets: Vec<WavepacketSpec> = if cfg.wavepacket.is_empty() {
        default_packets(p.n_sites as f64 * p.spacing)
    } else {
        cfg.wavepacket.iter().map(spec).collect()
    };
    let grid = sim.grid().clone();
    let mut state = match packets.as_slice() {
        [l, r] => two_wavepackets(grid, p.n_sites, p.spacing, p.mass, l, r),
        [_] => gaussian_wavepacket(grid, p.n_sites, p.spacing, p.mass, &packets),
        _ => return Err(ConfigError::Invalid(format!("scattering takes one or two wavepackets, got {}", packets.len())).into()),
    }
    .map_err(|e| ConfigError::Invalid(e.to_string()))?;
    let series = sim.evolve(&mut state)?;

    let n = p.n_sites;
    let regions: Vec<(usize, usize)> = if packets.len() == 2 { vec![(0, n / 2), (n / 2, n)] } else { vec![(0, n)] };
    let centroids: Vec<Vec<f64>> = series
        .field_vev
        .iter()
        .map(|row| regions.iter().map(|&(a, b)| centroid(row, a, b, p.spacing)).collect())
        .collect();
    let fit_end = if packets.len() == 2 { TWO_PACKET_FIT_TIME.min(p.total_time) } else { p.total_time };
    let speeds = (0..regions.len())
        .map(|k| {
            let (t, x): (Vec<f64>, Vec<f64>) = series
                .times
                .iter()
                .zip(&centroids)
                .filter(|(t, _)| **t <= fit_end + 1e-9)
                .map(|(t, c)| (*t, c[k]))
                .unzip();
            linear_slope(&t, &x)
        })
        .collect();
    let collision_time = (packets.len() == 2).then(|| {
        let lo = (n / 2).saturating_sub(COLLISION_HALF_WINDOW);
        let hi = (n / 2 + COLLISION_HALF_WINDOW).min(n - 1);
        let centre: Vec<f64> = series
            .energy_density
            .iter()
            .map(|row| row[lo..=hi].iter().sum::<f64>() / (hi - lo + 1) as f64)
            .collect();
        let best = (0..centre.len()).fold(0, |b, i| if centre[i] > centre[b] { i } else { b });
        series.times[best]
    });
    let energy_drift = series.relative_energy_drift();
    Ok(ScatteringRun {
        series,
        packets,
        centroids,
        speeds,
        collision_time,
        energy_drift,
    })
}

fn spec(w: &WavepacketConfig) -> WavepacketSpec {
    WavepacketSpec {
        center: w.center,
        momentum: w.momentum,
        width: w.width,
        amplitude: w.amplitude,
    }
}

fn default_packets(length: f64) -> Vec<WavepacketSpec> {
    vec![
        WavepacketSpec::new(0.3 * length, 0.3, 0.09),
        WavepacketSpec::new(0.7 * length, -0.3, 0.09),
    ]
}

/// First moment of `<q_n>^2` over sites `[from, to)`.
fn centroid(field: &[f64], from: usize, to: usize, spacing: f64) -> f64 {
    let (num, den) = (from..to).fold((0.0, 0.0), |(num, den), n| {
        let w = field[n] * field[n];
        (num + w * n as f64 * spacing, den + w)
    });
    if den > 0.0 {
        num / den
    } else {
        f64::NAN
    }
}

/// Least-squares slope of `y` against `x`.
pub fn linear_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (sxy, sxx) = x
        .iter()
        .zip(y)
        .fold((0.0, 0.0), |(sxy, sxx), (a, b)| (sxy + (a - mx) * (b - my), sxx + (a - mx) * (a - mx)));
    sxy / sxx
}

impl Experiment for Scattering {
    fn name(&self) -> &'static str {
        "scattering"
    }

    fn defaults(&self) -> ExperimentConfig {
        ExperimentConfig {
            n_sites: Some(500),
            mass: Some(1.0),
            coupling: Some(0.2),
            dt: Some(0.01),
            total_time: Some(350.0),
            record_stride: Some(100),
            ..Default::default()
        }
    }

    fn run(&self, cfg: &ExperimentConfig, out: &RunDir) -> Result<Metrics, RunError> {
        let run = run_scattering(cfg)?;
        out.write_series(&run.series)?;
        let header: &[&str] = if run.speeds.len() == 2 { &["t", "left", "right"] } else { &["t", "centroid"] };
        let rows = run.series.times.iter().zip(&run.centroids).map(|(t, c)| {
            std::iter::once(fmt_f64(*t)).chain(c.iter().map(|v| fmt_f64(*v))).collect()
        });
        out.write_table("centroids.csv", header, rows)?;
        let mut m = Metrics::default();
        match run.speeds.as_slice() {
            [l, r] => {
                m.push("centroid_speed_left", *l);
                m.push("centroid_speed_right", *r);
                m.push("centroid_speed", 0.5 * (l.abs() + r.abs()));
            }
            [v] => m.push("centroid_speed", *v),
            _ => {}
        }
        if let Some(t) = run.collision_time {
            m.push("collision_time", t);
        }
        m.push("initial_energy", run.series.total_energy[0]);
        m.push("energy_drift", run.energy_drift);
        m.push("max_norm_drift", max_of(&run.series.norm_drift));
        Ok(m)
    }
}
