use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;
use rustfft::{Fft, FftPlanner};

use super::renormalize_rows;
use crate::error::{invalid, Error, Result};
use crate::grid::QuadratureGrid;
use crate::registry::Registry;
use crate::wavefunction::{self, QumodeWavefunction};

/// Per-momentum hopping phases `c_a(q_j) = exp(+i dt cos(2 pi a / N) q_j^2 / a^2)`.
#[derive(Debug, Clone)]
pub struct HopPhases {
    n_sites: usize,
    spacing: f64,
    dt: f64,
    m_points: usize,
    // momentum-major: phases[alpha * M + j]
    phases: Vec<Complex64>,
}

pub fn build_hop_phases(grid: &QuadratureGrid, n_sites: usize, spacing: f64, dt: f64) -> Result<HopPhases> {
    if n_sites < 2 {
        return Err(invalid(format!("hopping needs at least 2 sites, got {n_sites}")));
    }
    if !(spacing.is_finite() && spacing > 0.0) {
        return Err(invalid(format!("lattice spacing must be positive, got {spacing}")));
    }
    let inv_a2 = 1.0 / (spacing * spacing);
    let mut phases = Vec::with_capacity(n_sites * grid.len());
    for alpha in 0..n_sites {
        let c = (2.0 * PI * alpha as f64 / n_sites as f64).cos();
        phases.extend(grid.points().iter().map(|q| Complex64::from_polar(1.0, dt * c * q * q * inv_a2)));
    }
    Ok(HopPhases {
        n_sites,
        spacing,
        dt,
        m_points: grid.len(),
        phases,
    })
}

impl HopPhases {
    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// `c_alpha(q_j)`.
    pub fn phase(&self, alpha: usize, j: usize) -> Complex64 {
        self.phases[alpha * self.m_points + j]
    }

    pub fn row(&self, alpha: usize) -> &[Complex64] {
        &self.phases[alpha * self.m_points..(alpha + 1) * self.m_points]
    }
}

/// Everything a hop strategy may need to set itself up.
#[derive(Debug, Clone)]
pub struct HopContext {
    pub grid: Arc<QuadratureGrid>,
    pub n_sites: usize,
    pub spacing: f64,
    pub dt: f64,
}

/// How the nearest-neighbour `q_n q_{n+1}` coupling acts on a product state.
///
/// Implementations update a row-major `n_sites x grid` amplitude block in
/// place and leave per-site renormalization to the caller.
pub trait HopTruncation: Send + Sync + fmt::Debug {
    fn name(&self) -> &'static str;
    fn apply(&self, amplitudes: &mut [Complex64]);
}

pub type HopCtor = fn(&HopContext) -> Result<Box<dyn HopTruncation>>;

/// Registered hop strategies. `circulant` is the default.
pub fn hop_truncations() -> Registry<HopCtor> {
    Registry::<HopCtor>::new("hop truncation")
        .register("circulant", |ctx| Ok(Box::new(CirculantHop::new(ctx)?)))
        .register("mean-field", |ctx| Ok(Box::new(MeanFieldHop::new(ctx)?)))
}

/// Mixes the site wavefunctions at each grid point with the circulant matrix
/// `sum_a U^dag_{n a} c_a(q) U_{a m}`, `U_{a m} = nu^{a m} / sqrt(N)`.
///
/// Diagonalized by a length-`N` FFT over the site index for every grid point.
pub struct CirculantHop {
    phases: HopPhases,
    // grid-major copy scaled by 1/N: scaled[j * N + alpha]
    scaled: Vec<Complex64>,
    to_momentum: Arc<dyn Fft<f64>>,
    to_sites: Arc<dyn Fft<f64>>,
}

impl fmt::Debug for CirculantHop {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CirculantHop").field("phases", &self.phases).finish_non_exhaustive()
    }
}

impl CirculantHop {
    pub fn new(ctx: &HopContext) -> Result<Self> {
        Ok(Self::from_phases(build_hop_phases(&ctx.grid, ctx.n_sites, ctx.spacing, ctx.dt)?))
    }

    pub fn from_phases(phases: HopPhases) -> Self {
        let n = phases.n_sites;
        let m = phases.m_points;
        let norm = 1.0 / n as f64;
        let mut scaled = vec![Complex64::default(); n * m];
        for alpha in 0..n {
            for j in 0..m {
                scaled[j * n + alpha] = phases.phase(alpha, j) * norm;
            }
        }
        let mut planner = FftPlanner::new();
        // nu^{+alpha m} is rustfft's inverse (unnormalized) direction
        let to_momentum = planner.plan_fft_inverse(n);
        let to_sites = planner.plan_fft_forward(n);
        Self {
            phases,
            scaled,
            to_momentum,
            to_sites,
        }
    }

    pub fn phases(&self) -> &HopPhases {
        &self.phases
    }
}

impl HopTruncation for CirculantHop {
    fn name(&self) -> &'static str {
        "circulant"
    }

    fn apply(&self, amplitudes: &mut [Complex64]) {
        let n = self.phases.n_sites;
        let m = self.phases.m_points;
        assert_eq!(amplitudes.len(), n * m, "amplitude block does not match the hop lattice");

        let mut columns = vec![Complex64::default(); n * m];
        for (site, row) in amplitudes.chunks_exact(m).enumerate() {
            for (j, &a) in row.iter().enumerate() {
                columns[j * n + site] = a;
            }
        }
        const GRID_BLOCK: usize = 8;
        columns
            .par_chunks_mut(GRID_BLOCK * n)
            .zip(self.scaled.par_chunks(GRID_BLOCK * n))
            .for_each(|(block, phases)| {
                let mut scratch = vec![Complex64::default(); self.to_momentum.get_inplace_scratch_len()];
                self.to_momentum.process_with_scratch(block, &mut scratch);
                block.iter_mut().zip(phases).for_each(|(v, c)| *v *= c);
                scratch.resize(self.to_sites.get_inplace_scratch_len(), Complex64::default());
                self.to_sites.process_with_scratch(block, &mut scratch);
            });
        for (site, row) in amplitudes.chunks_exact_mut(m).enumerate() {
            for (j, a) in row.iter_mut().enumerate() {
                *a = columns[j * n + site];
            }
        }
    }
}

/// Product-state (Hartree) truncation: each site feels the mean field of its
/// neighbours, `psi_n(q) <- psi_n(q) exp(+i dt q (<q_{n-1}> + <q_{n+1}>) / a^2)`.
#[derive(Debug, Clone)]
pub struct MeanFieldHop {
    grid: Arc<QuadratureGrid>,
    n_sites: usize,
    kick: f64,
}

impl MeanFieldHop {
    pub fn new(ctx: &HopContext) -> Result<Self> {
        if ctx.n_sites < 2 {
            return Err(invalid(format!("hopping needs at least 2 sites, got {}", ctx.n_sites)));
        }
        if !(ctx.spacing.is_finite() && ctx.spacing > 0.0) {
            return Err(invalid(format!("lattice spacing must be positive, got {}", ctx.spacing)));
        }
        Ok(Self {
            grid: ctx.grid.clone(),
            n_sites: ctx.n_sites,
            kick: ctx.dt / (ctx.spacing * ctx.spacing),
        })
    }
}

impl HopTruncation for MeanFieldHop {
    fn name(&self) -> &'static str {
        "mean-field"
    }

    fn apply(&self, amplitudes: &mut [Complex64]) {
        let m = self.grid.len();
        let n = self.n_sites;
        assert_eq!(amplitudes.len(), n * m, "amplitude block does not match the hop lattice");
        let means: Vec<f64> = amplitudes
            .chunks_exact(m)
            .map(|row| wavefunction::moment(&self.grid, row, 1))
            .collect();
        for (site, row) in amplitudes.chunks_exact_mut(m).enumerate() {
            let field = means[(site + n - 1) % n] + means[(site + 1) % n];
            for (a, &q) in row.iter_mut().zip(self.grid.points()) {
                *a *= Complex64::from_polar(1.0, self.kick * q * field);
            }
        }
    }
}

/// Applies the circulant hop to a set of site wavefunctions and renormalizes
/// each one. Returns the new sites and the largest pre-renormalization drift.
pub fn apply_hop(sites: &[QumodeWavefunction], hop: &HopPhases) -> Result<(Vec<QumodeWavefunction>, f64)> {
    if sites.len() != hop.n_sites {
        return Err(Error::SizeMismatch {
            expected: hop.n_sites,
            actual: sites.len(),
        });
    }
    let grid = sites[0].grid().clone();
    if let Some(bad) = sites.iter().find(|s| !s.grid().same_as(&grid)) {
        return Err(Error::SizeMismatch {
            expected: grid.len(),
            actual: bad.grid().len(),
        });
    }
    if grid.len() != hop.m_points {
        return Err(Error::SizeMismatch {
            expected: hop.m_points,
            actual: grid.len(),
        });
    }
    let mut block: Vec<Complex64> = sites.iter().flat_map(|s| s.amplitudes().iter().copied()).collect();
    CirculantHop::from_phases(hop.clone()).apply(&mut block);
    let drift = renormalize_rows(&grid, &mut block);
    let out = block
        .chunks_exact(grid.len())
        .map(|row| QumodeWavefunction::new(grid.clone(), row.to_vec()))
        .collect::<Result<_>>()?;
    Ok((out, drift))
}
