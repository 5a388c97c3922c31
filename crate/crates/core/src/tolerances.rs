//! Numerical tolerances shared by every module.

/// Structural checks: unitarity, Hermiticity, trace, statevector norm.
pub const STRUCTURAL: f64 = 1e-10;

/// Smallest eigenvalue accepted for a density matrix.
pub const EIGEN_FLOOR: f64 = -1e-8;

/// Kraus completeness `sum K^dag K = 1`.
pub const COMPLETENESS: f64 = 1e-8;

/// Upper slack on purity, `Tr[rho^2] <= 1 + PURITY_SLACK`.
pub const PURITY_SLACK: f64 = 1e-9;

/// Largest imaginary residue tolerated in an expectation value.
pub const IMAG_RESIDUE: f64 = 1e-9;

/// Negative outcome probabilities above this magnitude are an error.
pub const NEGATIVE_PROBABILITY: f64 = 1e-9;

/// Invertibility margin for known-observable calibration.
pub const INVERTIBILITY: f64 = 1e-6;
