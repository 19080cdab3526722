use std::sync::Arc;

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::{coherent_amplitudes, FockBasisTable};
use crate::grid::QuadratureGrid;

/// Largest tensor-product dimension the dense few-site oracle accepts.
pub const FEW_SITE_DIMENSION_LIMIT: usize = 20_000;

/// Exact periodic chain of a few oscillators in a truncated Fock basis.
///
/// `H = sum_n [omega (n_n + 1/2) + q_n^2 / a^2 + lambda q_n^4 / 24]
///      - (1/a^2) sum_n q_{n+1} q_n`, diagonalized once.
#[derive(Debug, Clone)]
pub struct FewSiteSystem {
    n_sites: usize,
    cutoff: usize,
    omega: f64,
    energies: Vec<f64>,
    vectors: DMatrix<f64>,
}

impl FewSiteSystem {
    pub fn new(n_sites: usize, spacing: f64, omega: f64, coupling: f64, cutoff: usize) -> Result<Self> {
        if n_sites < 2 {
            return Err(invalid(format!("few-site oracle needs at least 2 sites, got {n_sites}")));
        }
        if !(omega > 0.0 && spacing > 0.0 && coupling >= 0.0) {
            return Err(invalid("few-site oracle needs omega > 0, spacing > 0, coupling >= 0"));
        }
        let levels = cutoff + 1;
        let dimension = u32::try_from(n_sites)
            .ok()
            .and_then(|p| levels.checked_pow(p))
            .filter(|&d| d <= FEW_SITE_DIMENSION_LIMIT)
            .ok_or(Error::DimensionOverflow {
                dimension: levels.saturating_pow(n_sites.min(u32::MAX as usize) as u32),
                limit: FEW_SITE_DIMENSION_LIMIT,
            })?;

        let (q2, q4) = exact_even_powers(levels, omega);
        let q = truncated_q_plain(levels, omega);
        let inv_a2 = 1.0 / (spacing * spacing);
        let mut local = vec![0.0; levels * levels];
        for i in 0..levels {
            for j in 0..levels {
                local[i * levels + j] = q2[i * levels + j] * inv_a2 + coupling / 24.0 * q4[i * levels + j];
            }
            local[i * levels + i] += omega * (i as f64 + 0.5);
        }
        let mut h = DMatrix::<f64>::zeros(dimension, dimension);
        let mut digits = vec![0usize; n_sites];
        for col in 0..dimension {
            decode(col, levels, &mut digits);
            for site in 0..n_sites {
                let stride = levels.pow((n_sites - 1 - site) as u32);
                let l = digits[site];
                for lp in 0..levels {
                    let v = local[lp * levels + l];
                    if v != 0.0 {
                        h[(col + lp * stride - l * stride, col)] += v;
                    }
                }
            }
            for site in 0..n_sites {
                let next = (site + 1) % n_sites;
                let (sa, sb) = (levels.pow((n_sites - 1 - site) as u32), levels.pow((n_sites - 1 - next) as u32));
                let (la, lb) = (digits[site], digits[next]);
                for la2 in la.saturating_sub(1)..=(la + 1).min(cutoff) {
                    for lb2 in lb.saturating_sub(1)..=(lb + 1).min(cutoff) {
                        let v = q[la2 * levels + la] * q[lb2 * levels + lb];
                        if v != 0.0 {
                            let row = col + la2 * sa + lb2 * sb - la * sa - lb * sb;
                            h[(row, col)] -= inv_a2 * v;
                        }
                    }
                }
            }
        }
        let eig = SymmetricEigen::try_new(h, 1e-13, 0)
            .ok_or_else(|| Error::Diagonalization(format!("{dimension}-dimensional chain Hamiltonian did not converge")))?;
        Ok(Self {
            n_sites,
            cutoff,
            omega,
            energies: eig.eigenvalues.iter().copied().collect(),
            vectors: eig.eigenvectors,
        })
    }

    pub fn dimension(&self) -> usize {
        self.energies.len()
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    /// Product of coherent states with `<q_n> = displacements[n]`, truncated
    /// at the cutoff and renormalized.
    pub fn coherent_product(&self, displacements: &[f64]) -> Result<Vec<Complex64>> {
        if displacements.len() != self.n_sites {
            return Err(Error::SizeMismatch {
                expected: self.n_sites,
                actual: displacements.len(),
            });
        }
        let per_site: Vec<Vec<Complex64>> = displacements
            .iter()
            .map(|d| coherent_amplitudes(Complex64::new(d * (self.omega / 2.0).sqrt(), 0.0), self.cutoff))
            .collect();
        let levels = self.cutoff + 1;
        let mut digits = vec![0usize; self.n_sites];
        let mut psi: Vec<Complex64> = (0..self.dimension())
            .map(|i| {
                decode(i, levels, &mut digits);
                digits.iter().zip(&per_site).map(|(&l, c)| c[l]).product()
            })
            .collect();
        let norm = psi.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        psi.iter_mut().for_each(|c| *c /= norm);
        Ok(psi)
    }

    pub fn evolve(&self, psi: &[Complex64], t: f64) -> Result<Vec<Complex64>> {
        let dim = self.dimension();
        if psi.len() != dim {
            return Err(Error::SizeMismatch {
                expected: dim,
                actual: psi.len(),
            });
        }
        let mut out = vec![Complex64::default(); dim];
        for (e, &energy) in self.energies.iter().enumerate() {
            let col = self.vectors.column(e);
            let c: Complex64 = col.iter().zip(psi).map(|(v, a)| a * *v).sum();
            let c = c * Complex64::from_polar(1.0, -energy * t);
            for (o, v) in out.iter_mut().zip(col.iter()) {
                *o += c * *v;
            }
        }
        Ok(out)
    }

    /// Reduced density matrix of `site`, `(cutoff+1)^2`, row-major.
    pub fn reduced_density(&self, psi: &[Complex64], site: usize) -> Vec<Complex64> {
        let levels = self.cutoff + 1;
        let mut rho = vec![Complex64::default(); levels * levels];
        let mut digits = vec![0usize; self.n_sites];
        let stride = levels.pow((self.n_sites - 1 - site) as u32);
        for (i, a) in psi.iter().enumerate() {
            decode(i, levels, &mut digits);
            let l = digits[site];
            for lp in 0..levels {
                let j = i + lp * stride - l * stride;
                rho[l * levels + lp] += a * psi[j].conj();
            }
        }
        rho
    }

    /// Position-space density `<q|rho_site|q>` on the grid.
    pub fn site_density(&self, grid: Arc<QuadratureGrid>, psi: &[Complex64], site: usize) -> Result<Vec<f64>> {
        let table = FockBasisTable::new(grid, self.omega, self.cutoff)?;
        let rho = self.reduced_density(psi, site);
        let levels = self.cutoff + 1;
        Ok((0..table.grid().len())
            .map(|i| {
                let mut v = Complex64::default();
                for l in 0..levels {
                    for lp in 0..levels {
                        v += rho[l * levels + lp] * table.value(i, l) * table.value(i, lp);
                    }
                }
                v.re
            })
            .collect())
    }
}

fn decode(mut index: usize, levels: usize, digits: &mut [usize]) {
    for d in digits.iter_mut().rev() {
        *d = index % levels;
        index /= levels;
    }
}

/// `q^2` and `q^4` in the kept Fock block, computed on a space four levels
/// larger so that the truncation does not clip intermediate states.
fn exact_even_powers(levels: usize, omega: f64) -> (Vec<f64>, Vec<f64>) {
    let big = levels + 4;
    let q = truncated_q_plain(big, omega);
    let q2 = matmul(&q, &q, big);
    let q4 = matmul(&q2, &q2, big);
    let crop = |m: &[f64]| -> Vec<f64> { m.chunks_exact(big).take(levels).flat_map(|row| row[..levels].to_vec()).collect() };
    (crop(&q2), crop(&q4))
}

fn truncated_q_plain(levels: usize, omega: f64) -> Vec<f64> {
    let s = 1.0 / (2.0 * omega).sqrt();
    let mut q = vec![0.0; levels * levels];
    for l in 1..levels {
        let v = s * (l as f64).sqrt();
        q[(l - 1) * levels + l] = v;
        q[l * levels + l - 1] = v;
    }
    q
}

fn matmul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik != 0.0 {
                for j in 0..n {
                    out[i * n + j] += aik * b[k * n + j];
                }
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dimension_cap() {
        assert!(matches!(
            FewSiteSystem::new(3, 1.0, 1.0, 0.0, 30),
            Err(Error::DimensionOverflow { dimension: 29_791, .. })
        ));
        assert!(FewSiteSystem::new(1, 1.0, 1.0, 0.0, 4).is_err());
    }

    #[test]
    fn exact_powers_match_closed_forms() {
        let (q2, q4) = exact_even_powers(6, 1.0);
        // <l|q^2|l> = (2l+1)/2, <l|q^4|l> = 3(2l^2+2l+1)/4 at omega = 1
        for l in 0..6 {
            let lf = l as f64;
            assert!((q2[l * 6 + l] - (2.0 * lf + 1.0) / 2.0).abs() < 1e-12);
            assert!((q4[l * 6 + l] - 3.0 * (2.0 * lf * lf + 2.0 * lf + 1.0) / 4.0).abs() < 1e-12);
        }
    }

    #[test]
    fn two_site_normal_modes() {
        // N = 2 periodic doubles the bond: modes omega^2 and omega^2 + 4/a^2
        let (omega, a) = (1.0, 1.0);
        let sys = FewSiteSystem::new(2, a, omega, 0.0, 14).unwrap();
        let mut e = sys.energies().to_vec();
        e.sort_by(f64::total_cmp);
        let w_minus = (omega * omega + 4.0 / (a * a)).sqrt();
        let e0 = 0.5 * (omega + w_minus);
        assert!((e[0] - e0).abs() < 1e-6, "{} vs {e0}", e[0]);
        assert!((e[1] - (e0 + omega)).abs() < 1e-5);
    }

    #[test]
    fn free_chain_field_follows_normal_modes() {
        let (omega, a, d) = (1.0, 1.0, 0.8);
        let sys = FewSiteSystem::new(2, a, omega, 0.0, 24).unwrap();
        let psi0 = sys.coherent_product(&[d, 0.0]).unwrap();
        let g = Arc::new(QuadratureGrid::new(160, 16.0).unwrap());
        let xi = g.spacing();
        let w_minus = (omega * omega + 4.0 / (a * a)).sqrt();
        for t in [0.3, 1.0] {
            let psi = sys.evolve(&psi0, t).unwrap();
            let norm: f64 = psi.iter().map(|c| c.norm_sqr()).sum();
            assert!((norm - 1.0).abs() < 1e-10);
            let rho = sys.site_density(g.clone(), &psi, 0).unwrap();
            let mean: f64 = xi * g.points().iter().zip(&rho).map(|(q, r)| q * r).sum::<f64>();
            let want = 0.5 * d * ((omega * t).cos() + (w_minus * t).cos());
            assert!((mean - want).abs() < 2e-5, "t={t}: {mean} vs {want}");
        }
    }

    #[test]
    fn reduced_density_is_a_state() {
        let sys = FewSiteSystem::new(3, 1.0, 1.0, 0.4, 5).unwrap();
        let psi = sys.evolve(&sys.coherent_product(&[0.5, 0.0, -0.3]).unwrap(), 0.7).unwrap();
        for site in 0..3 {
            let rho = sys.reduced_density(&psi, site);
            let trace: Complex64 = (0..6).map(|l| rho[l * 6 + l]).sum();
            assert!((trace.re - 1.0).abs() < 1e-10 && trace.im.abs() < 1e-12);
            for l in 0..6 {
                for lp in 0..6 {
                    assert!((rho[l * 6 + lp] - rho[lp * 6 + l].conj()).norm() < 1e-12);
                }
            }
        }
    }
}
