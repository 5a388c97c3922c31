//! Noisy density-matrix circuit simulation and global-depolarizing error
//! mitigation.
//!
//! The crate is organised bottom-up:
//!
//! - [`qstate`]: dense statevectors, density matrices, Pauli observables.
//! - [`circuits`]: gates, layered circuits, Trotterized Ising evolution,
//!   brickwork circuits and the exact-diagonalization reference.
//! - [`noise`]: Kraus channels, gate-attached noise models, noisy execution
//!   and the whole-register depolarizing map.
//! - [`randmeas`]: randomized-measurement purity estimation.
//! - [`mitigation`]: calibration of the global error probability and
//!   inversion of the depolarizing ansatz.
//! - [`analysis`]: time series, damped-cosine fitting, meson masses.
//! - [`experiments`]: configurable end-to-end runs used by the
//!   `depolarize` binary.
//!
//! Qubit 0 is the least significant bit of a basis-state index throughout.

pub mod analysis;
pub mod circuits;
pub mod error;
pub mod experiments;
pub mod mitigation;
pub mod noise;
pub mod qstate;
pub mod randmeas;
mod rng;
pub mod tolerances;

pub use error::{Error, Result};
pub use num_complex::Complex64 as C64;
