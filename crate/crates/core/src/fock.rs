use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::QuadratureGrid;
use crate::wavefunction::QumodeWavefunction;

pub const DEFAULT_L_TRUNC: usize = 80;

/// Oscillator eigenfunctions `<q_i|l>` for `l = 0..=l_trunc`, tabulated on a grid.
///
/// Columns come from the normalized Hermite-function recurrence, so there are
/// no factorials anywhere and entries stay finite well past `l = 200`.
#[derive(Debug, Clone)]
pub struct FockBasisTable {
    grid: Arc<QuadratureGrid>,
    omega: f64,
    l_trunc: usize,
    // row-major, grid index by Fock level
    values: Vec<f64>,
}

impl FockBasisTable {
    pub fn new(grid: Arc<QuadratureGrid>, omega: f64, l_trunc: usize) -> Result<Self> {
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid(format!("oscillator frequency must be positive, got {omega}")));
        }
        let levels = l_trunc + 1;
        let mut values = vec![0.0; grid.len() * levels];
        let root_omega = omega.sqrt();
        let prefactor = (omega / std::f64::consts::PI).powf(0.25);
        for (row, &q) in values.chunks_exact_mut(levels).zip(grid.points()) {
            let x = root_omega * q;
            row[0] = prefactor * (-0.5 * x * x).exp();
            if levels > 1 {
                row[1] = std::f64::consts::SQRT_2 * x * row[0];
            }
            for l in 1..l_trunc {
                let lf = l as f64;
                row[l + 1] = (2.0 / (lf + 1.0)).sqrt() * x * row[l] - (lf / (lf + 1.0)).sqrt() * row[l - 1];
            }
        }
        Ok(Self {
            grid,
            omega,
            l_trunc,
            values,
        })
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn l_trunc(&self) -> usize {
        self.l_trunc
    }

    pub fn levels(&self) -> usize {
        self.l_trunc + 1
    }

    /// `<q_i|l>`.
    pub fn value(&self, i: usize, l: usize) -> f64 {
        self.values[i * self.levels() + l]
    }

    /// Row-major `M x (l_trunc + 1)` storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.values
    }

    pub fn column(&self, l: usize) -> impl Iterator<Item = f64> + '_ {
        self.values.iter().skip(l).step_by(self.levels()).copied()
    }

    /// `c_l = spacing * sum_i <l|q_i> psi(q_i)`.
    pub fn decompose(&self, psi: &QumodeWavefunction) -> Result<Vec<Complex64>> {
        self.check_grid(psi.grid())?;
        let mut coeffs = vec![Complex64::default(); self.levels()];
        for (row, &amp) in self.values.chunks_exact(self.levels()).zip(psi.amplitudes()) {
            for (c, &t) in coeffs.iter_mut().zip(row) {
                *c += amp * t;
            }
        }
        let xi = self.grid.spacing();
        coeffs.iter_mut().for_each(|c| *c *= xi);
        Ok(coeffs)
    }

    /// Inverse of [`decompose`](Self::decompose); the result is renormalized, so
    /// weight beyond `l_trunc` shows up only as a shape error.
    pub fn compose(&self, coeffs: &[Complex64]) -> Result<QumodeWavefunction> {
        if coeffs.len() > self.levels() {
            return Err(Error::SizeMismatch {
                expected: self.levels(),
                actual: coeffs.len(),
            });
        }
        let amplitudes = self
            .values
            .chunks_exact(self.levels())
            .map(|row| row.iter().zip(coeffs).map(|(&t, &c)| c * t).sum())
            .collect();
        QumodeWavefunction::new(self.grid.clone(), amplitudes)
    }

    fn check_grid(&self, other: &QuadratureGrid) -> Result<()> {
        if self.grid.same_as(other) {
            Ok(())
        } else {
            Err(Error::SizeMismatch {
                expected: self.grid.len(),
                actual: other.len(),
            })
        }
    }
}

/// Fock amplitudes `exp(-|alpha|^2/2) alpha^l / sqrt(l!)` of a coherent state.
pub fn coherent_amplitudes(alpha: Complex64, l_max: usize) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(l_max + 1);
    let mut c = Complex64::new((-0.5 * alpha.norm_sqr()).exp(), 0.0);
    for l in 0..=l_max {
        out.push(c);
        c *= alpha / ((l + 1) as f64).sqrt();
    }
    out
}
