//! Product-state qumode emulation of a real scalar field with quartic
//! self-interaction on a periodic one-dimensional lattice.
//!
//! Each lattice site carries one continuous-variable mode stored as a
//! wavefunction on a uniform quadrature grid. Time evolution is a first-order
//! Trotter product of a hopping transform, a diagonal potential phase and a
//! harmonic rotation.

pub mod error;
pub mod fock;
pub mod gates;
pub mod grid;
pub mod lattice;
mod linalg;
pub mod observables;
pub mod oracle;
pub mod potential;
pub mod registry;
pub mod state_prep;
pub mod wavefunction;

pub use error::{Error, Result};
pub use fock::{coherent_amplitudes, FockBasisTable, DEFAULT_L_TRUNC};
pub use grid::QuadratureGrid;
pub use potential::{interactions, EffectivePotential, Interaction, InteractionParams, Phi4};
pub use registry::Registry;
pub use wavefunction::{displaced_ground_state, ground_state, QumodeWavefunction};
pub use lattice::{GridConfig, LatticeState, ObservableSeries, SimulationParams, Simulator};
pub use observables::{field_expectation, EnergyFunctional};
pub use state_prep::WavepacketSpec;
