//! Initial lattice states: localized impulses and Gaussian wavepackets.

use std::f64::consts::PI;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{invalid, Error, Result};
use crate::fock::FockBasisTable;
use crate::grid::QuadratureGrid;
use crate::lattice::LatticeState;
use crate::oracle::{dispersion, signed_momentum};
use crate::wavefunction::displaced_ground_state;

/// Gaussian packet in lattice momentum centred at position `center`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WavepacketSpec {
    pub center: f64,
    pub momentum: f64,
    pub width: f64,
    pub amplitude: f64,
}

impl WavepacketSpec {
    pub fn new(center: f64, momentum: f64, width: f64) -> Self {
        Self {
            center,
            momentum,
            width,
            amplitude: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.width.is_finite() && self.width > 0.0) {
            return Err(invalid(format!("wavepacket width must be positive, got {}", self.width)));
        }
        if !(self.center.is_finite() && self.momentum.is_finite() && self.amplitude.is_finite()) {
            return Err(invalid("wavepacket parameters must be finite"));
        }
        Ok(())
    }

    /// Conditions under which a decoupled-oscillator excitation is a poor
    /// stand-in for a field quantum.
    pub fn relativistic_warnings(&self, omega: f64) -> Vec<String> {
        let mut out = Vec::new();
        if self.momentum.abs() >= omega {
            out.push(format!("|momentum| {} is not below the mass {omega}", self.momentum));
        }
        if self.width >= omega {
            out.push(format!("momentum width {} is not below the mass {omega}", self.width));
        }
        out
    }
}

/// All sites in the ground state except `site`, displaced by `amplitude`.
pub fn delta_impulse(
    grid: Arc<QuadratureGrid>,
    n_sites: usize,
    omega: f64,
    site: usize,
    amplitude: f64,
) -> Result<LatticeState> {
    if site >= n_sites {
        return Err(Error::OutOfRange(format!("impulse site {site} on a lattice of {n_sites}")));
    }
    let mut state = LatticeState::vacuum(grid.clone(), n_sites, omega)?;
    state.set_site(site, &displaced_ground_state(grid, omega, amplitude)?)?;
    Ok(state)
}

/// One-quantum amplitude `c1_n` that a packet places on each site.
pub fn single_excitation_amplitudes(spec: &WavepacketSpec, n_sites: usize, spacing: f64, omega: f64) -> Vec<Complex64> {
    let omegas = dispersion(n_sites, spacing, omega).omegas;
    let modes: Vec<(f64, f64)> = (0..n_sites)
        .map(|alpha| {
            let k = signed_momentum(alpha, n_sites, spacing);
            let weight = spec.amplitude * envelope(spec, k) / (2.0 * omegas[alpha] * n_sites as f64).sqrt();
            (k, weight)
        })
        .collect();
    (0..n_sites)
        .map(|n| {
            let x = n as f64 * spacing - spec.center;
            modes.iter().map(|&(k, w)| Complex64::from_polar(w, k * x)).sum()
        })
        .collect()
}

fn envelope(spec: &WavepacketSpec, k: f64) -> f64 {
    let dk = k - spec.momentum;
    (-dk * dk / (2.0 * spec.width * spec.width)).exp()
}

/// Sites in `c0 |0> + c1 |1>` with the summed one-quantum amplitudes of all
/// packets and `c0 = sqrt(1 - |c1|^2)`.
pub fn gaussian_wavepacket(
    grid: Arc<QuadratureGrid>,
    n_sites: usize,
    spacing: f64,
    omega: f64,
    specs: &[WavepacketSpec],
) -> Result<LatticeState> {
    let mut c1 = vec![Complex64::default(); n_sites];
    for spec in specs {
        spec.validate()?;
        for w in spec.relativistic_warnings(omega) {
            log::warn!("wavepacket at {}: {w}", spec.center);
        }
        for (acc, c) in c1.iter_mut().zip(single_excitation_amplitudes(spec, n_sites, spacing, omega)) {
            *acc += c;
        }
    }
    let table = FockBasisTable::new(grid.clone(), omega, 1)?;
    let sites = c1
        .iter()
        .enumerate()
        .map(|(n, &c)| {
            let p = c.norm_sqr();
            if p > 1.0 {
                return Err(Error::OutOfRange(format!(
                    "one-quantum probability {p} exceeds 1 at site {n}; lower the packet amplitude"
                )));
            }
            table.compose(&[Complex64::new((1.0 - p).sqrt(), 0.0), c])
        })
        .collect::<Result<Vec<_>>>()?;
    LatticeState::from_sites(sites)
}

/// Normalized overlap of two packets' position-space envelopes.
pub fn envelope_overlap(a: &WavepacketSpec, b: &WavepacketSpec, n_sites: usize, spacing: f64, omega: f64) -> f64 {
    let ca = single_excitation_amplitudes(a, n_sites, spacing, omega);
    let cb = single_excitation_amplitudes(b, n_sites, spacing, omega);
    let norm = |c: &[Complex64]| c.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
    let (na, nb) = (norm(&ca), norm(&cb));
    if na == 0.0 || nb == 0.0 {
        return 0.0;
    }
    ca.iter().zip(&cb).map(|(x, y)| x.norm() * y.norm()).sum::<f64>() / (na * nb)
}

/// Two packets, warning when their envelopes overlap by more than `1e-6`.
pub fn two_wavepackets(
    grid: Arc<QuadratureGrid>,
    n_sites: usize,
    spacing: f64,
    omega: f64,
    left: &WavepacketSpec,
    right: &WavepacketSpec,
) -> Result<LatticeState> {
    let overlap = envelope_overlap(left, right, n_sites, spacing, omega);
    if overlap > 1e-6 {
        log::warn!("wavepacket envelopes overlap ({overlap:.3e}); the packets are not well separated");
    }
    gaussian_wavepacket(grid, n_sites, spacing, omega, &[*left, *right])
}

/// Real displacement per site for a packet seeded by coherent displacements:
/// `(A / (omega N)) sum_a exp(-(k_a - k)^2 / 2 sigma^2) cos(k_a (x_n - x))`.
pub fn proto_wavepacket_profile(spec: &WavepacketSpec, n_sites: usize, spacing: f64, omega: f64) -> Vec<f64> {
    let scale = spec.amplitude / (omega * n_sites as f64);
    let modes: Vec<(f64, f64)> = (0..n_sites)
        .map(|alpha| {
            let k = signed_momentum(alpha, n_sites, spacing);
            (k, envelope(spec, k))
        })
        .collect();
    (0..n_sites)
        .map(|n| {
            let x = n as f64 * spacing - spec.center;
            scale * modes.iter().map(|&(k, w)| w * (k * x).cos()).sum::<f64>()
        })
        .collect()
}

/// Lattice of ground states displaced by [`proto_wavepacket_profile`].
pub fn proto_wavepacket(
    grid: Arc<QuadratureGrid>,
    n_sites: usize,
    spacing: f64,
    omega: f64,
    spec: &WavepacketSpec,
) -> Result<LatticeState> {
    spec.validate()?;
    let sites = proto_wavepacket_profile(spec, n_sites, spacing, omega)
        .into_iter()
        .map(|d| displaced_ground_state(grid.clone(), omega, d))
        .collect::<Result<Vec<_>>>()?;
    LatticeState::from_sites(sites)
}

/// Nearest allowed lattice momentum to `k`.
pub fn nearest_lattice_momentum(k: f64, n_sites: usize, spacing: f64) -> f64 {
    let unit = 2.0 * PI / (spacing * n_sites as f64);
    (k / unit).round() * unit
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::observables::field_expectation;
    use rustfft::FftPlanner;

    fn grid() -> Arc<QuadratureGrid> {
        Arc::new(QuadratureGrid::new(120, 16.0).unwrap())
    }

    #[test]
    fn impulse_profile() {
        let s = delta_impulse(grid(), 8, 1.0, 4, 1.5).unwrap();
        let f = field_expectation(&s);
        for (n, v) in f.iter().enumerate() {
            let want = if n == 4 { 1.5 } else { 0.0 };
            assert!((v - want).abs() < 1e-8);
        }
        assert!(delta_impulse(grid(), 8, 1.0, 8, 1.0).is_err());
        assert!(delta_impulse(grid(), 8, 1.0, 0, 7.0).is_err());
    }

    #[test]
    fn zero_impulse_is_vacuum() {
        let g = grid();
        let s = delta_impulse(g.clone(), 6, 0.7, 3, 0.0).unwrap();
        assert_eq!(s, LatticeState::vacuum(g, 6, 0.7).unwrap());
    }

    #[test]
    fn narrow_packet_selects_one_mode() {
        let (n, a) = (40, 1.0);
        let k_beta = 2.0 * PI * 3.0 / n as f64;
        let spec = WavepacketSpec::new(10.0, k_beta, 1e-4);
        let c = single_excitation_amplitudes(&spec, n, a, 1.0);
        let ratio = c[1] / c[0];
        for w in c.windows(2) {
            assert!((w[1] / w[0] - ratio).norm() < 1e-12);
        }
        assert!((ratio - Complex64::from_polar(1.0, k_beta)).norm() < 1e-12);
    }

    #[test]
    fn momentum_content_peaks_at_centre() {
        let (n, a, omega) = (64, 1.0, 1.0);
        let spec = WavepacketSpec::new(20.0, 0.4, 0.15);
        let mut c = single_excitation_amplitudes(&spec, n, a, omega);
        // c_n = sum_a w_a e^{i k_a x_n}: an inverse DFT, so the forward DFT recovers N w_a e^{-i k_a xbar}
        FftPlanner::new().plan_fft_forward(n).process(&mut c);
        let omegas = dispersion(n, a, omega).omegas;
        for (alpha, v) in c.iter().enumerate() {
            let k = signed_momentum(alpha, n, a);
            let want = n as f64 * envelope(&spec, k) / (2.0 * omegas[alpha] * n as f64).sqrt();
            assert!((v.norm() - want).abs() < 1e-10);
        }
        let peak = (0..n).max_by(|&i, &j| c[i].norm().total_cmp(&c[j].norm())).unwrap();
        let unit = 2.0 * PI / n as f64;
        assert!((signed_momentum(peak, n, a) - spec.momentum).abs() <= unit);
    }

    #[test]
    fn prepared_sites_are_normalized_two_level_states() {
        let g = grid();
        let spec = WavepacketSpec::new(30.0, 0.3, 0.09);
        let s = gaussian_wavepacket(g.clone(), 60, 1.0, 1.0, &[spec]).unwrap();
        let table = FockBasisTable::new(g, 1.0, 6).unwrap();
        let c1 = single_excitation_amplitudes(&spec, 60, 1.0, 1.0);
        for n in 0..60 {
            let psi = s.site_wavefunction(n);
            assert!((psi.norm_sqr() - 1.0).abs() < 1e-12);
            let c = table.decompose(&psi).unwrap();
            assert!((c[1] - c1[n]).norm() < 1e-8);
            assert!(c[2..].iter().all(|x| x.norm() < 1e-8));
            assert!(c[0].im.abs() < 1e-10 && c[0].re >= 0.0);
        }
    }

    #[test]
    fn oversized_packet_rejected() {
        let spec = WavepacketSpec {
            amplitude: 50.0,
            ..WavepacketSpec::new(10.0, 0.0, 0.3)
        };
        assert!(matches!(
            gaussian_wavepacket(grid(), 20, 1.0, 1.0, &[spec]),
            Err(Error::OutOfRange(_))
        ));
    }

    #[test]
    fn zero_amplitude_pair_is_vacuum() {
        let g = grid();
        let zero = WavepacketSpec {
            amplitude: 0.0,
            ..WavepacketSpec::new(5.0, 0.3, 0.1)
        };
        let s = two_wavepackets(g.clone(), 12, 1.0, 1.0, &zero, &zero).unwrap();
        assert!(s.max_abs_diff(&LatticeState::vacuum(g, 12, 1.0).unwrap()) < 1e-12);
    }

    #[test]
    fn separated_packets_do_not_overlap() {
        let l = WavepacketSpec::new(75.0, 0.3, 0.09);
        let r = WavepacketSpec::new(175.0, -0.3, 0.09);
        assert!(envelope_overlap(&l, &r, 250, 1.0, 0.6) < 1e-6);
        assert!(envelope_overlap(&l, &l, 250, 1.0, 0.6) > 0.999);
    }

    #[test]
    fn relativistic_flags() {
        assert!(WavepacketSpec::new(0.0, 0.3, 0.09).relativistic_warnings(1.0).is_empty());
        assert_eq!(WavepacketSpec::new(0.0, 1.2, 1.1).relativistic_warnings(1.0).len(), 2);
    }

    #[test]
    fn proto_profile_is_symmetric_for_zero_momentum() {
        let n = 41;
        let spec = WavepacketSpec::new(20.0, 0.0, 0.2);
        let p = proto_wavepacket_profile(&spec, n, 1.0, 1.0);
        for i in 0..n {
            assert!((p[i] - p[(40 - i + n) % n]).abs() < 1e-12);
        }
        let s = proto_wavepacket(grid(), n, 1.0, 1.0, &spec).unwrap();
        let f = field_expectation(&s);
        for i in 0..n {
            assert!((f[i] - p[i]).abs() < 1e-8);
        }
    }

    #[test]
    fn nearest_momentum() {
        let unit = 2.0 * PI / 500.0;
        assert!((nearest_lattice_momentum(0.3, 500, 1.0) - 24.0 * unit).abs() < 1e-12);
    }
}
