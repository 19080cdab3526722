use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::grid::QuadratureGrid;
use crate::wavefunction::QumodeWavefunction;

/// Exact evolution of one qumode under `H = p^2/2 + omega^2 q^2/2 + V(q)` on
/// the grid, with a spectral kinetic term, by one dense diagonalization.
#[derive(Debug, Clone)]
pub struct ExactQumodeEvolver {
    grid: Arc<QuadratureGrid>,
    energies: Vec<f64>,
    // column-major eigenvectors
    vectors: DMatrix<f64>,
}

impl ExactQumodeEvolver {
    pub fn new(grid: Arc<QuadratureGrid>, omega: f64, potential: impl Fn(f64) -> f64) -> Result<Self> {
        let m = grid.len();
        let k = grid.wavenumbers();
        // circulant kinetic kernel, f(d) = (1/M) sum_m (k_m^2 / 2) cos(2 pi m d / M)
        let kernel: Vec<f64> = (0..m)
            .map(|d| {
                k.iter()
                    .enumerate()
                    .map(|(mm, km)| 0.5 * km * km * (2.0 * PI * (mm * d) as f64 / m as f64).cos())
                    .sum::<f64>()
                    / m as f64
            })
            .collect();
        let mut h = DMatrix::from_fn(m, m, |i, j| kernel[(i + m - j) % m]);
        for (i, &q) in grid.points().iter().enumerate() {
            let v = potential(q);
            if !v.is_finite() {
                return Err(invalid(format!("potential is not finite at q = {q}")));
            }
            h[(i, i)] += 0.5 * omega * omega * q * q + v;
        }
        let eig = SymmetricEigen::try_new(h, 1e-14, 0)
            .ok_or_else(|| Error::Diagonalization(format!("{m} x {m} grid Hamiltonian did not converge")))?;
        Ok(Self {
            grid,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn grid(&self) -> &Arc<QuadratureGrid> {
        &self.grid
    }

    /// Eigenvalues in the order nalgebra returns them (unsorted).
    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn evolve(&self, psi: &QumodeWavefunction, t: f64) -> Result<QumodeWavefunction> {
        let m = self.grid.len();
        if !psi.grid().same_as(&self.grid) {
            return Err(Error::SizeMismatch {
                expected: m,
                actual: psi.grid().len(),
            });
        }
        let amps = psi.amplitudes();
        let coeffs: Vec<Complex64> = (0..m)
            .map(|e| {
                let c: Complex64 = self.vectors.column(e).iter().zip(amps).map(|(v, a)| a * *v).sum();
                c * Complex64::from_polar(1.0, -self.energies[e] * t)
            })
            .collect();
        let mut out = vec![Complex64::default(); m];
        for (e, c) in coeffs.iter().enumerate() {
            for (o, v) in out.iter_mut().zip(self.vectors.column(e).iter()) {
                *o += c * *v;
            }
        }
        QumodeWavefunction::new(self.grid.clone(), out)
    }
}
