//! Gate-level circuits, Trotterized Ising evolution, brickwork circuits and
//! exact diagonalization.

mod brickwork;
mod circuit;
pub mod ed;
mod gate;
mod tfim;

pub use brickwork::{brickwork_angle_count, build_brickwork};
pub use circuit::Circuit;
pub use ed::{ed_energy_gaps, ed_evolve, SpectralLine, Spectrum};
pub use gate::{Gate, GateKind};
pub use tfim::{basis_index, build_tfim_trotter, domain_state, tfim_hamiltonian, TfimParams};
