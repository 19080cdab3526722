use std::sync::Arc;

use num_complex::Complex64;
use rayon::prelude::*;

use super::ROW_BLOCK;
use crate::fock::FockBasisTable;
use crate::linalg;

/// Harmonic rotation `exp(-i dt omega (n + 1/2))` projected onto the grid
/// through the truncated Fock basis.
///
/// The dense matrix is `U_ij = xi * sum_l <q_i|l> e^{-i dt omega (l+1/2)} <l|q_j>`;
/// it has rank `l_trunc + 1`, so it is applied in factored form.
#[derive(Debug, Clone)]
pub struct RotationGate {
    table: Arc<FockBasisTable>,
    dt: f64,
    phases: Vec<Complex64>,
    weighted: Vec<f64>,
}

pub fn build_rotation(table: Arc<FockBasisTable>, dt: f64) -> RotationGate {
    let omega = table.omega();
    let phases = (0..table.levels())
        .map(|l| Complex64::from_polar(1.0, -dt * omega * (l as f64 + 0.5)))
        .collect();
    let xi = table.grid().spacing();
    let weighted = table.as_slice().iter().map(|v| v * xi).collect();
    RotationGate {
        table,
        dt,
        phases,
        weighted,
    }
}

impl RotationGate {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn table(&self) -> &Arc<FockBasisTable> {
        &self.table
    }

    pub fn phases(&self) -> &[Complex64] {
        &self.phases
    }

    /// Materializes the `M x M` row-major matrix.
    pub fn matrix(&self) -> Vec<Complex64> {
        let m = self.table.grid().len();
        let k = self.table.levels();
        let t = self.table.as_slice();
        let mut out = vec![Complex64::default(); m * m];
        for i in 0..m {
            for j in 0..m {
                out[i * m + j] = (0..k).map(|l| self.phases[l] * (self.weighted[i * k + l] * t[j * k + l])).sum();
            }
        }
        out
    }

    /// Applies the gate in place to every row of a `rows x M` block.
    pub fn apply_rows(&self, rows: &mut [Complex64]) {
        let m = self.table.grid().len();
        assert_eq!(rows.len() % m, 0, "row block is not a multiple of the grid size");
        rows.par_chunks_mut(ROW_BLOCK * m).for_each(|block| self.apply_block(block, m));
    }

    fn apply_block(&self, block: &mut [Complex64], m: usize) {
        let n = block.len() / m;
        let k = self.table.levels();
        let mut coeffs = vec![Complex64::default(); n * k];
        linalg::project(block, n, m, &self.weighted, k, &mut coeffs);
        for row in coeffs.chunks_exact_mut(k) {
            row.iter_mut().zip(&self.phases).for_each(|(c, p)| *c *= p);
        }
        linalg::expand(&coeffs, n, k, self.table.as_slice(), m, block);
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::QuadratureGrid;
    use crate::wavefunction::{displaced_ground_state, ground_state, QumodeWavefunction};

    fn table() -> Arc<FockBasisTable> {
        let g = Arc::new(QuadratureGrid::new(200, 20.0).unwrap());
        Arc::new(FockBasisTable::new(g, 1.0, 80).unwrap())
    }

    fn rotate(gate: &RotationGate, psi: &QumodeWavefunction) -> Vec<Complex64> {
        let mut a = psi.amplitudes().to_vec();
        gate.apply_rows(&mut a);
        a
    }

    #[test]
    fn zero_step_is_identity_on_low_states() {
        let t = table();
        let gate = build_rotation(t.clone(), 0.0);
        let psi = displaced_ground_state(t.grid().clone(), 1.0, 1.5).unwrap();
        let out = rotate(&gate, &psi);
        let diff = out.iter().zip(psi.amplitudes()).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn ground_state_picks_up_global_phase() {
        let t = table();
        let dt = 0.37;
        let gate = build_rotation(t.clone(), dt);
        let psi = ground_state(t.grid().clone(), 1.0).unwrap();
        let out = rotate(&gate, &psi);
        let phase = Complex64::from_polar(1.0, -dt / 2.0);
        for (a, b) in out.iter().zip(psi.amplitudes()) {
            assert!((a - b * phase).norm() < 1e-10);
            assert!((a.norm_sqr() - b.norm_sqr()).abs() < 1e-10);
        }
    }

    #[test]
    fn factored_matches_dense_matrix() {
        let g = Arc::new(QuadratureGrid::new(40, 12.0).unwrap());
        let t = Arc::new(FockBasisTable::new(g.clone(), 1.3, 20).unwrap());
        let gate = build_rotation(t, 0.2);
        let psi = displaced_ground_state(g, 1.3, 0.7).unwrap();
        let dense = gate.matrix();
        let out = rotate(&gate, &psi);
        let m = 40;
        for i in 0..m {
            let expected: Complex64 = (0..m).map(|j| dense[i * m + j] * psi.amplitudes()[j]).sum();
            assert!((expected - out[i]).norm() < 1e-12);
        }
    }

    #[test]
    fn forward_then_backward_recovers_state() {
        let t = table();
        let fwd = build_rotation(t.clone(), 0.01);
        let back = build_rotation(t.clone(), -0.01);
        let psi = displaced_ground_state(t.grid().clone(), 1.0, 1.0).unwrap();
        let mut a = psi.amplitudes().to_vec();
        fwd.apply_rows(&mut a);
        back.apply_rows(&mut a);
        let diff = a.iter().zip(psi.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
        assert!(diff < 1e-8);
    }
}
