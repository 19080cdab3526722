//! Field expectation values and the site-resolved energy density.

use std::fmt;
use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::grid::QuadratureGrid;
use crate::lattice::LatticeState;
use crate::potential::Interaction;
use crate::wavefunction;

/// `<q_n>` for every site.
pub fn field_expectation(state: &LatticeState) -> Vec<f64> {
    (0..state.n_sites())
        .map(|n| wavefunction::moment(state.grid(), state.site(n), 1))
        .collect()
}

/// Lattice energy evaluated on a product state.
///
/// Site `n` carries `p^2/2 + omega^2 q^2/2 + V(q)` plus half of each adjacent
/// gradient bond `(<q_{n+1}^2> + <q_n^2> - 2 <q_{n+1}><q_n>) / (2 a^2)`.
pub struct EnergyFunctional {
    grid: Arc<QuadratureGrid>,
    mass: f64,
    spacing: f64,
    interaction: Arc<dyn Interaction>,
    fft: Arc<dyn Fft<f64>>,
    k_sqr: Vec<f64>,
    potential: Vec<f64>,
}

impl fmt::Debug for EnergyFunctional {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EnergyFunctional")
            .field("mass", &self.mass)
            .field("spacing", &self.spacing)
            .field("interaction", &self.interaction)
            .finish_non_exhaustive()
    }
}

impl EnergyFunctional {
    pub fn new(grid: Arc<QuadratureGrid>, mass: f64, spacing: f64, interaction: Arc<dyn Interaction>) -> Self {
        let fft = FftPlanner::new().plan_fft_forward(grid.len());
        let k_sqr = grid.wavenumbers().iter().map(|k| k * k).collect();
        let potential = grid.points().iter().map(|&q| interaction.value(q)).collect();
        Self {
            grid,
            mass,
            spacing,
            interaction,
            fft,
            k_sqr,
            potential,
        }
    }

    /// Spectral `<p^2>` of one site.
    pub fn momentum_sqr(&self, amplitudes: &[Complex64]) -> f64 {
        momentum_sqr_with(&*self.fft, &self.k_sqr, amplitudes)
    }

    /// Kinetic, mass and interaction energy of one site, without gradient bonds.
    pub fn local_energy(&self, amplitudes: &[Complex64]) -> f64 {
        let norm = wavefunction::norm_sqr(&self.grid, amplitudes);
        let xi = self.grid.spacing();
        let (q2, v) = self
            .grid
            .points()
            .iter()
            .zip(amplitudes)
            .zip(&self.potential)
            .fold((0.0, 0.0), |(q2, v), ((q, a), pot)| {
                let w = a.norm_sqr();
                (q2 + q * q * w, v + pot * w)
            });
        0.5 * self.momentum_sqr(amplitudes) + (0.5 * self.mass * self.mass * q2 + v) * xi / norm
    }

    pub fn energy_density(&self, state: &LatticeState) -> Vec<f64> {
        let n = state.n_sites();
        let g = state.grid();
        let mean: Vec<f64> = (0..n).map(|s| wavefunction::moment(g, state.site(s), 1)).collect();
        let second: Vec<f64> = (0..n).map(|s| wavefunction::moment(g, state.site(s), 2)).collect();
        let inv = 1.0 / (2.0 * self.spacing * self.spacing);
        // bond[s] couples s and s+1
        let bond: Vec<f64> = (0..n)
            .map(|s| {
                let t = (s + 1) % n;
                (second[t] + second[s] - 2.0 * mean[t] * mean[s]) * inv
            })
            .collect();
        (0..n)
            .map(|s| self.local_energy(state.site(s)) + 0.5 * (bond[s] + bond[(s + n - 1) % n]))
            .collect()
    }

    pub fn total_energy(&self, state: &LatticeState) -> f64 {
        self.energy_density(state).iter().sum()
    }

    pub fn interaction(&self) -> &Arc<dyn Interaction> {
        &self.interaction
    }
}

/// Spectral `<p^2>` for a standalone wavefunction.
pub fn momentum_sqr(grid: &QuadratureGrid, amplitudes: &[Complex64]) -> f64 {
    let fft = FftPlanner::new().plan_fft_forward(grid.len());
    let k_sqr: Vec<f64> = grid.wavenumbers().iter().map(|k| k * k).collect();
    momentum_sqr_with(&*fft, &k_sqr, amplitudes)
}

fn momentum_sqr_with(fft: &dyn Fft<f64>, k_sqr: &[f64], amplitudes: &[Complex64]) -> f64 {
    let mut buf = amplitudes.to_vec();
    fft.process(&mut buf);
    let (num, den) = buf
        .iter()
        .zip(k_sqr)
        .fold((0.0, 0.0), |(num, den), (c, k2)| (num + k2 * c.norm_sqr(), den + c.norm_sqr()));
    num / den
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::{Free, Phi4};
    use crate::wavefunction::{displaced_ground_state, ground_state, QumodeWavefunction};

    fn grid() -> Arc<QuadratureGrid> {
        Arc::new(QuadratureGrid::new(200, 20.0).unwrap())
    }

    #[test]
    fn gaussian_momentum_variance() {
        let g = grid();
        for omega in [0.6, 1.0, 2.5] {
            let psi = ground_state(g.clone(), omega).unwrap();
            assert!((momentum_sqr(&g, psi.amplitudes()) - omega / 2.0).abs() < 1e-10);
        }
    }

    #[test]
    fn plane_wave_factor_adds_momentum() {
        let g = grid();
        let k0 = 1.5;
        let psi = QumodeWavefunction::from_fn(g.clone(), |q| Complex64::from_polar((-q * q / 2.0).exp(), k0 * q)).unwrap();
        assert!((momentum_sqr(&g, psi.amplitudes()) - (0.5 + k0 * k0)).abs() < 1e-8);
    }

    #[test]
    fn vacuum_energy_density_closed_form() {
        let g = grid();
        let (omega, a) = (0.8, 1.3);
        let state = LatticeState::vacuum(g.clone(), 5, omega).unwrap();
        let e = EnergyFunctional::new(g, omega, a, Arc::new(Free));
        let expected = omega / 2.0 + 1.0 / (2.0 * a * a * omega);
        for v in e.energy_density(&state) {
            assert!((v - expected).abs() < 1e-9, "{v} vs {expected}");
        }
    }

    #[test]
    fn coherent_site_energy() {
        let g = grid();
        let d = 1.7;
        let psi = displaced_ground_state(g.clone(), 1.0, d).unwrap();
        let e = EnergyFunctional::new(g, 1.0, 1.0, Arc::new(Free));
        assert!((e.local_energy(psi.amplitudes()) - (0.5 + d * d / 2.0)).abs() < 1e-9);
    }

    #[test]
    fn quartic_expectation_in_ground_state() {
        // <q^4> = 3 / (4 omega^2) for the oscillator ground state
        let g = grid();
        let lambda = 0.6;
        let psi = ground_state(g.clone(), 1.0).unwrap();
        let e = EnergyFunctional::new(g, 1.0, 1.0, Arc::new(Phi4 { coupling: lambda }));
        assert!((e.local_energy(psi.amplitudes()) - (0.5 + lambda / 24.0 * 0.75)).abs() < 1e-9);
    }

    #[test]
    fn bonds_split_between_neighbours() {
        let g = grid();
        let mut state = LatticeState::vacuum(g.clone(), 4, 1.0).unwrap();
        state.set_site(1, &displaced_ground_state(g.clone(), 1.0, 2.0).unwrap()).unwrap();
        let e = EnergyFunctional::new(g, 1.0, 1.0, Arc::new(Free));
        let dens = e.energy_density(&state);
        let vac = 0.5 + 0.5;
        // bond 0-1 and 1-2 each gain d^2/2; site 1 also gains d^2/2 locally
        assert!((dens[0] - (vac + 1.0)).abs() < 1e-9);
        assert!((dens[2] - (vac + 1.0)).abs() < 1e-9);
        assert!((dens[3] - vac).abs() < 1e-9);
        assert!((dens[1] - (vac + 2.0 + 2.0)).abs() < 1e-9);
        assert_eq!(field_expectation(&state)[1].round(), 2.0);
    }
}
