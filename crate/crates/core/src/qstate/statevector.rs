use super::{check_targets, check_unitary, kernel, Matrix, PauliObservable, PauliString};
use crate::{tolerances, Error, Result, C64};

/// Normalized pure state of `n >= 1` qubits.
#[derive(Debug, Clone, PartialEq)]
pub struct Statevector {
    n: usize,
    amps: Vec<C64>,
}

impl Statevector {
    pub fn new(amps: Vec<C64>) -> Result<Self> {
        let len = amps.len();
        if len < 2 || !len.is_power_of_two() {
            return Err(Error::InvalidState(format!(
                "{len} amplitudes is not 2^n with n >= 1"
            )));
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > tolerances::STRUCTURAL {
            return Err(Error::InvalidState(format!("squared norm {norm} != 1")));
        }
        Ok(Self {
            n: len.trailing_zeros() as usize,
            amps,
        })
    }

    /// Rescales arbitrary nonzero amplitudes to unit norm.
    pub fn normalized(mut amps: Vec<C64>) -> Result<Self> {
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(Error::InvalidState("zero or non-finite norm".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::new(amps)
    }

    /// Computational basis state `|index>`.
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        if n == 0 || n > 30 {
            return Err(Error::arg(format!("unsupported qubit count {n}")));
        }
        let dim = 1usize << n;
        if index >= dim {
            return Err(Error::arg(format!("basis index {index} >= {dim}")));
        }
        let mut amps = vec![C64::default(); dim];
        amps[index] = C64::new(1.0, 0.0);
        Ok(Self { n, amps })
    }

    pub fn zero(n: usize) -> Result<Self> {
        Self::basis(n, 0)
    }

    pub(crate) fn from_raw(n: usize, amps: Vec<C64>) -> Self {
        debug_assert_eq!(amps.len(), 1 << n);
        Self { n, amps }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn apply_unitary(&self, gate: &Matrix, targets: &[usize]) -> Result<Self> {
        check_unitary(gate)?;
        let k = super::arity_of(gate.nrows())?;
        check_targets(targets, self.n, k)?;
        let mut out = self.clone();
        out.apply_in_place(gate, targets);
        Ok(out)
    }

    /// Unchecked in-place application for already validated gates.
    pub(crate) fn apply_in_place(&mut self, gate: &Matrix, targets: &[usize]) {
        kernel::apply(&mut self.amps, gate, targets);
    }

    pub fn inner(&self, other: &Statevector) -> Result<C64> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    pub(crate) fn pauli_expectation(&self, s: &PauliString) -> C64 {
        let x = s.x_mask();
        self.amps
            .iter()
            .enumerate()
            .map(|(b, a)| self.amps[b ^ x].conj() * s.phase(b) * a)
            .sum()
    }

    pub fn expectation(&self, obs: &PauliObservable) -> Result<f64> {
        if obs.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: obs.n(),
            });
        }
        let v: C64 = obs
            .terms()
            .iter()
            .map(|(c, s)| self.pauli_expectation(s) * *c)
            .sum();
        if v.im.abs() > tolerances::IMAG_RESIDUE * obs.norm_bound().max(1.0) {
            return Err(Error::InvalidState(format!(
                "expectation has imaginary part {}",
                v.im
            )));
        }
        Ok(v.re)
    }

    /// Outcome probabilities in the computational basis.
    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }
}
