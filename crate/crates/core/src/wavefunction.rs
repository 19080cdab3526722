use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::QuadratureGrid;

/// Complex amplitudes `psi(q_j)` of a single qumode on a shared grid.
///
/// Every constructor returns a unit-norm state under the quadrature rule
/// `spacing * sum |psi_j|^2`.
#[derive(Debug, Clone)]
pub struct QumodeWavefunction {
    grid: Arc<QuadratureGrid>,
    amplitudes: Vec<Complex64>,
}

impl QumodeWavefunction {
    /// Wraps `amplitudes` and normalizes them.
    pub fn new(grid: Arc<QuadratureGrid>, amplitudes: Vec<Complex64>) -> Result<Self> {
        if amplitudes.len() != grid.len() {
            return Err(Error::SizeMismatch {
                expected: grid.len(),
                actual: amplitudes.len(),
            });
        }
        let mut psi = Self { grid, amplitudes };
        let norm = psi.norm_sqr();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(invalid(format!("cannot normalize wavefunction with norm {norm}")));
        }
        psi.scale(1.0 / norm.sqrt());
        Ok(psi)
    }

    pub fn from_fn(grid: Arc<QuadratureGrid>, f: impl Fn(f64) -> Complex64) -> Result<Self> {
        let amplitudes = grid.points().iter().map(|&q| f(q)).collect();
        Self::new(grid, amplitudes)
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> Vec<Complex64> {
        self.amplitudes
    }

    pub fn norm_sqr(&self) -> f64 {
        norm_sqr(&self.grid, &self.amplitudes)
    }

    /// Rescales to unit norm and returns the norm-squared found beforehand.
    pub fn renormalize(&mut self) -> f64 {
        let norm = self.norm_sqr();
        if norm > 0.0 {
            self.scale(1.0 / norm.sqrt());
        }
        norm
    }

    fn scale(&mut self, factor: f64) {
        for a in &mut self.amplitudes {
            *a *= factor;
        }
    }

    pub fn density(&self) -> Vec<f64> {
        self.amplitudes.iter().map(|a| a.norm_sqr()).collect()
    }

    /// `<q^power>` for the normalized state.
    pub fn moment(&self, power: i32) -> f64 {
        moment(&self.grid, &self.amplitudes, power)
    }

    pub fn mean_q(&self) -> f64 {
        self.moment(1)
    }

    pub fn variance_q(&self) -> f64 {
        let m = self.mean_q();
        self.moment(2) - m * m
    }

    /// `<self|other>` under the quadrature rule.
    pub fn inner(&self, other: &QumodeWavefunction) -> Complex64 {
        self.grid.spacing()
            * self
                .amplitudes
                .iter()
                .zip(&other.amplitudes)
                .map(|(a, b)| a.conj() * b)
                .sum::<Complex64>()
    }

    pub fn fidelity(&self, other: &QumodeWavefunction) -> f64 {
        self.inner(other).norm_sqr()
    }

    /// Largest pointwise amplitude difference.
    pub fn max_abs_diff(&self, other: &QumodeWavefunction) -> f64 {
        max_abs_diff(&self.amplitudes, &other.amplitudes)
    }
}

pub(crate) fn norm_sqr(grid: &QuadratureGrid, amplitudes: &[Complex64]) -> f64 {
    grid.spacing() * amplitudes.iter().map(|a| a.norm_sqr()).sum::<f64>()
}

pub(crate) fn moment(grid: &QuadratureGrid, amplitudes: &[Complex64], power: i32) -> f64 {
    let raw: f64 = grid
        .points()
        .iter()
        .zip(amplitudes)
        .map(|(q, a)| q.powi(power) * a.norm_sqr())
        .sum();
    grid.spacing() * raw / norm_sqr(grid, amplitudes)
}

pub(crate) fn max_abs_diff(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}


/// Harmonic-oscillator ground state `exp(-omega q^2 / 2)` for frequency `omega`.
pub fn ground_state(grid: Arc<QuadratureGrid>, omega: f64) -> Result<QumodeWavefunction> {
    displaced_ground_state(grid, omega, 0.0)
}

/// Ground state shifted to `<q> = displacement`, evaluated analytically on the grid.
///
/// The shifted Gaussian must sit at least five widths inside the grid edges.
pub fn displaced_ground_state(
    grid: Arc<QuadratureGrid>,
    omega: f64,
    displacement: f64,
) -> Result<QumodeWavefunction> {
    if !(omega.is_finite() && omega > 0.0) {
        return Err(invalid(format!("oscillator frequency must be positive, got {omega}")));
    }
    let reach = displacement.abs() + 5.0 / omega.sqrt();
    if !(reach < grid.extent() / 2.0) {
        return Err(Error::OutOfRange(format!(
            "displacement {displacement} with width 5/sqrt({omega}) leaves the grid [-{0}, {0})",
            grid.extent() / 2.0
        )));
    }
    QumodeWavefunction::from_fn(grid, |q| {
        let x = q - displacement;
        Complex64::new((-0.5 * omega * x * x).exp(), 0.0)
    })
}
