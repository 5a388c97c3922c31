//! Global-depolarizing error mitigation.
//!
//! The noisy output is modelled as `(1 - p) rho + p I/2^n`. A single
//! parameter `p_tot` is calibrated either from the purity of a circuit whose
//! ideal output is pure, or from an observable with a known ideal value.
//! Measured expectation values and subsystem purities are then inverted
//! through the same model.

mod calibration;
mod invert;
mod store;
mod trotter;
mod uncertainty;

pub use calibration::{
    average_purity_groups, calibrate_known_observable, calibrate_purity, purity_of_ptot,
    solve_ptot_from_purity, Calibration, GroupedPurity, KnownObservableSpec, Method,
};
pub use invert::{
    mitigate_expectation, mitigate_renyi, mitigate_subsystem_purity, subsystem_purity_of_ptot,
    MitigatedValue,
};
pub use store::{append_calibration, latest_calibration, read_calibrations};
pub use trotter::{trotter_extrapolate, trotter_extrapolate_with_sigma, TrotterFit};
pub use uncertainty::{delta_expectation, delta_ptot, delta_renyi, SigmaMode};
