use num_complex::Complex64;

use super::RotationGate;
use crate::error::{invalid, Error, Result};
use crate::grid::QuadratureGrid;
use crate::wavefunction::QumodeWavefunction;

/// Diagonal gate `exp(-i dt V(q_j))`.
#[derive(Debug, Clone)]
pub struct PotentialPhase {
    diagonal: Vec<Complex64>,
}

pub fn build_potential_phase(grid: &QuadratureGrid, potential: impl Fn(f64) -> f64, dt: f64) -> Result<PotentialPhase> {
    let diagonal = grid
        .points()
        .iter()
        .map(|&q| {
            let v = potential(q);
            if v.is_finite() {
                Ok(Complex64::from_polar(1.0, -dt * v))
            } else {
                Err(invalid(format!("potential is not finite at q = {q}")))
            }
        })
        .collect::<Result<_>>()?;
    Ok(PotentialPhase { diagonal })
}

impl PotentialPhase {
    pub fn diagonal(&self) -> &[Complex64] {
        &self.diagonal
    }

    pub fn apply_rows(&self, rows: &mut [Complex64]) {
        let m = self.diagonal.len();
        assert_eq!(rows.len() % m, 0, "row block is not a multiple of the grid size");
        for row in rows.chunks_exact_mut(m) {
            row.iter_mut().zip(&self.diagonal).for_each(|(a, p)| *a *= p);
        }
    }
}

/// One diagonal half of a Trotter step on a single qumode: the potential phase,
/// then the rotation. Returns the renormalized state and its norm-squared from
/// before renormalization.
pub fn apply_diagonal_step(
    psi: &QumodeWavefunction,
    rotation: &RotationGate,
    potential: &PotentialPhase,
) -> Result<(QumodeWavefunction, f64)> {
    let m = psi.grid().len();
    if rotation.table().grid().len() != m || potential.diagonal.len() != m {
        return Err(Error::SizeMismatch {
            expected: m,
            actual: potential.diagonal.len(),
        });
    }
    let mut amps = psi.amplitudes().to_vec();
    potential.apply_rows(&mut amps);
    rotation.apply_rows(&mut amps);
    let raw = crate::wavefunction::norm_sqr(psi.grid(), &amps);
    Ok((QumodeWavefunction::new(psi.grid().clone(), amps)?, raw))
}
