//! Purity estimation from randomized local measurements.
//!
//! Each of `N_u` rounds applies an independent Haar-random single-qubit
//! unitary to every qubit of the subsystem, then records `N_m`
//! computational-basis shots. Per round the estimator
//!
//! ```text
//! X_u = 2^{n_A} sum_{s,s'} (-2)^{-D(s,s')} P(s) P(s')
//! ```
//!
//! with Hamming distance `D` is evaluated with unbiased pair products
//! `n_s (n_s' - [s = s']) / (N_m (N_m - 1))`. The purity estimate is the mean
//! over rounds and its uncertainty comes from resampling rounds.

mod estimator;
mod records;
mod unitaries;

pub use estimator::{
    bootstrap_sigma, estimate_purity, estimate_purity_with, jackknife_sigma, PurityEstimate,
    Resampler,
};
pub use records::{marginalize, read_records_csv, simulate_shots, write_records_csv, ShotRecord};
pub use unitaries::{haar_unitary, sample_local_random_unitaries};

/// Draws the plan's unitaries, simulates its shots on `rho` and estimates the
/// subsystem purity.
pub fn measure_purity(
    rho: &crate::qstate::DensityMatrix,
    plan: &MeasurementPlan,
    resampler: Resampler,
) -> Result<PurityEstimate> {
    let unitaries = sample_local_random_unitaries(plan)?;
    let records = simulate_shots(rho, &unitaries, plan)?;
    estimate_purity_with(&records, plan, resampler)
}

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementPlan {
    /// Number of random unitaries.
    pub n_u: usize,
    /// Shots per unitary.
    pub n_m: usize,
    /// Measured qubits; local bit `j` of an outcome is `subsystem[j]`.
    pub subsystem: Vec<usize>,
    pub seed: u64,
}

impl MeasurementPlan {
    pub fn new(n_u: usize, n_m: usize, subsystem: Vec<usize>, seed: u64) -> Result<Self> {
        let plan = Self {
            n_u,
            n_m,
            subsystem,
            seed,
        };
        plan.validate()?;
        Ok(plan)
    }

    /// Whole register `0..n`.
    pub fn full(n: usize, n_u: usize, n_m: usize, seed: u64) -> Result<Self> {
        Self::new(n_u, n_m, (0..n).collect(), seed)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_u < 2 || self.n_m < 2 {
            return Err(Error::arg(format!(
                "need N_u >= 2 and N_m >= 2, got {} and {}",
                self.n_u, self.n_m
            )));
        }
        if self.subsystem.is_empty() {
            return Err(Error::arg("measured subsystem is empty"));
        }
        if self.subsystem.len() > 16 {
            return Err(Error::arg("measured subsystem limited to 16 qubits"));
        }
        for (i, q) in self.subsystem.iter().enumerate() {
            if self.subsystem[..i].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        Ok(())
    }

    pub fn n_a(&self) -> usize {
        self.subsystem.len()
    }

    /// Independent generator for stream `k` of this plan. Streams `2u` and
    /// `2u + 1` belong to unitary `u` (rotation and shots), so results do
    /// not depend on evaluation order or thread count.
    pub(crate) fn rng(&self, stream: u64) -> rand_chacha::ChaCha8Rng {
        crate::rng::stream_rng(self.seed, stream)
    }
}
