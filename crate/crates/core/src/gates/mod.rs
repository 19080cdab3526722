//! The three operators of a Trotter step: oscillator rotation, diagonal
//! potential phase, and the entanglement-truncated hopping transform.

mod hop;
mod phase;
mod rotation;

pub use hop::{
    apply_hop, build_hop_phases, hop_truncations, CirculantHop, HopContext, HopCtor, HopPhases, HopTruncation,
    MeanFieldHop,
};
pub use phase::{apply_diagonal_step, build_potential_phase, PotentialPhase};
pub use rotation::{build_rotation, RotationGate};

use num_complex::Complex64;

use crate::grid::QuadratureGrid;
use crate::wavefunction;

/// Rows of `grid.len()` amplitudes processed per parallel task. Fixed so the
/// floating-point result does not depend on the thread count.
pub(crate) const ROW_BLOCK: usize = 16;

/// Renormalizes every row of a `sites x grid` block, returning the largest
/// `|norm^2 - 1|` seen before rescaling.
pub(crate) fn renormalize_rows(grid: &QuadratureGrid, rows: &mut [Complex64]) -> f64 {
    let mut drift: f64 = 0.0;
    let mut finite = true;
    for row in rows.chunks_exact_mut(grid.len()) {
        let norm = wavefunction::norm_sqr(grid, row);
        if norm > 0.0 && norm.is_finite() {
            drift = drift.max((norm - 1.0).abs());
            let s = 1.0 / norm.sqrt();
            row.iter_mut().for_each(|a| *a *= s);
        } else {
            finite = false;
        }
    }
    if finite {
        drift
    } else {
        f64::NAN
    }
}
