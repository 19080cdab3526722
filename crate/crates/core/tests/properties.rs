//! Symmetry, reversibility and norm properties of the lattice stepper.

use std::sync::Arc;

use cvlattice_core::gates::{build_hop_phases, build_potential_phase, build_rotation, CirculantHop, HopTruncation};
use cvlattice_core::wavefunction::displaced_ground_state;
use cvlattice_core::{
    field_expectation, FockBasisTable, GridConfig, LatticeState, Phi4, QuadratureGrid, QumodeWavefunction,
    SimulationParams, Simulator,
};
use num_complex::Complex64;
use proptest::prelude::*;

const GRID: GridConfig = GridConfig {
    m_points: 64,
    extent: 14.0,
    l_trunc: 30,
};

fn params(n_sites: usize, coupling: f64, steps: u64) -> SimulationParams {
    SimulationParams {
        n_sites,
        coupling,
        total_time: steps as f64 * 0.01,
        record_stride: 1,
        grid: GRID,
        ..SimulationParams::default()
    }
}

fn displaced_lattice(sim: &Simulator, displacements: &[f64]) -> LatticeState {
    let sites = displacements
        .iter()
        .map(|&d| displaced_ground_state(sim.grid().clone(), sim.params().mass, d).unwrap())
        .collect();
    LatticeState::from_sites(sites).unwrap()
}

fn site_list() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.2f64..1.2, 3..8)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn translation_covariance(d in site_list(), shift in 1usize..7, coupling in 0.0f64..1.0, hop in prop::sample::select(vec!["circulant", "mean-field"])) {
        let n = d.len();
        let sim = Simulator::with_strategies(params(n, coupling, 12), Arc::new(Phi4 { coupling }), hop).unwrap();
        let mut a = displaced_lattice(&sim, &d);
        let mut b = a.rotated(shift);
        let sa = sim.evolve(&mut a).unwrap();
        let sb = sim.evolve(&mut b).unwrap();
        for (ra, rb) in sa.field_vev.iter().zip(&sb.field_vev) {
            for s in 0..n {
                prop_assert!((ra[s] - rb[(s + shift) % n]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn reflection_symmetry(half in prop::collection::vec(-1.2f64..1.2, 2..5), coupling in 0.0f64..1.0, hop in prop::sample::select(vec!["circulant", "mean-field"])) {
        // mirror about site 0: d[n] = d[N - n]
        let n = 2 * half.len();
        let mut d = vec![0.0; n];
        d[0] = half[0];
        for (i, &v) in half.iter().enumerate().skip(1) {
            d[i] = v;
            d[n - i] = v;
        }
        d[half.len()] = -half[0];
        let sim = Simulator::with_strategies(params(n, coupling, 12), Arc::new(Phi4 { coupling }), hop).unwrap();
        let mut state = displaced_lattice(&sim, &d);
        prop_assert_eq!(&state.reflected(0), &state);
        let series = sim.evolve(&mut state).unwrap();
        for row in &series.field_vev {
            for s in 1..n {
                prop_assert!((row[s] - row[n - s]).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn forward_then_reverse(d in site_list(), coupling in 0.0f64..1.0, hop in prop::sample::select(vec!["circulant", "mean-field"])) {
        let sim = Simulator::with_strategies(params(d.len(), coupling, 1), Arc::new(Phi4 { coupling }), hop).unwrap();
        let start = displaced_lattice(&sim, &d);
        let mut state = start.clone();
        sim.step(&mut state).unwrap();
        sim.step_reverse(&mut state).unwrap();
        prop_assert!(state.min_site_fidelity(&start) >= 1.0 - 1e-6);
    }

    #[test]
    fn diagonal_gates_conserve_site_norm(d in -1.5f64..1.5, coupling in 0.0f64..1.0) {
        let grid = Arc::new(GRID.build().unwrap());
        let table = Arc::new(FockBasisTable::new(grid.clone(), 1.0, GRID.l_trunc).unwrap());
        let rot = build_rotation(table, 0.01);
        let pot = build_potential_phase(&grid, |q| q * q + coupling / 24.0 * q.powi(4), 0.01).unwrap();
        let psi = displaced_ground_state(grid, 1.0, d).unwrap();
        let (_, raw) = cvlattice_core::gates::apply_diagonal_step(&psi, &rot, &pot).unwrap();
        prop_assert!((raw - 1.0).abs() < 1e-6);
    }

    #[test]
    fn circulant_hop_matches_dense(n in 2usize..=8, dt in -0.2f64..0.2, spacing in 0.5f64..2.0, seed in prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 8)) {
        let grid = QuadratureGrid::new(24, 8.0).unwrap();
        let m = grid.len();
        let phases = build_hop_phases(&grid, n, spacing, dt).unwrap();
        let block: Vec<Complex64> = (0..n * m)
            .map(|i| {
                let (re, im) = seed[i % seed.len()];
                Complex64::new(re, im) * (1.0 + (i / seed.len()) as f64 * 0.01)
            })
            .collect();
        let mut fast = block.clone();
        CirculantHop::from_phases(phases.clone()).apply(&mut fast);
        let nu = |p: i64| Complex64::from_polar(1.0, 2.0 * std::f64::consts::PI * p as f64 / n as f64);
        for j in 0..m {
            for r in 0..n {
                let mut want = Complex64::default();
                for c in 0..n {
                    let mut u = Complex64::default();
                    for alpha in 0..n {
                        // U^dag_{r a} c_a U_{a c}
                        u += nu(-((alpha * r) as i64)) * phases.phase(alpha, j) * nu((alpha * c) as i64);
                    }
                    want += u / n as f64 * block[c * m + j];
                }
                prop_assert!((fast[r * m + j] - want).norm() < 1e-10);
            }
        }
    }

    #[test]
    fn degenerate_lattice_cancels(n in 2usize..10, spacing in 0.5f64..2.0, dt in 0.001f64..0.05, d in -1.5f64..1.5, k in -1.0f64..1.0) {
        let grid = Arc::new(QuadratureGrid::new(64, 14.0).unwrap());
        let psi = QumodeWavefunction::from_fn(grid.clone(), |q| {
            Complex64::from_polar((-(q - d) * (q - d) / 2.0 - 0.1 * q.powi(4) / 10.0).exp(), k * q + 0.05 * q * q)
        }).unwrap();
        let phases = build_hop_phases(&grid, n, spacing, dt).unwrap();
        let (out, _) = cvlattice_core::gates::apply_hop(&vec![psi.clone(); n], &phases).unwrap();
        let remnant = build_potential_phase(&grid, |q| q * q / (spacing * spacing), dt).unwrap();
        for site in out {
            let mut a = site.into_amplitudes();
            remnant.apply_rows(&mut a);
            let diff = a.iter().zip(psi.amplitudes()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
            prop_assert!(diff < 1e-8);
        }
    }
}

#[test]
fn vacuum_field_is_zero_with_interaction() {
    let sim = Simulator::new(params(5, 0.8, 50)).unwrap();
    let mut state = sim.vacuum().unwrap();
    let series = sim.evolve(&mut state).unwrap();
    assert!(series.field_vev.iter().flatten().all(|v| v.abs() < 1e-10));
    assert!(field_expectation(&state).iter().all(|v| v.abs() < 1e-10));
}
