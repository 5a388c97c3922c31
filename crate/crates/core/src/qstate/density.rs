use nalgebra::SymmetricEigen;

use super::{
    check_targets, check_unitary, kernel, Matrix, PauliObservable, PauliString, Statevector,
};
use crate::{tolerances, Error, Result, C64};

/// Density matrix of `n >= 1` qubits, stored row-major.
///
/// Constructors from external data validate Hermiticity, unit trace and the
/// eigenvalue floor. Values produced by this crate's own channels are
/// trusted and not re-validated on every step.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<C64>,
}

impl DensityMatrix {
    /// Builds and validates a density matrix from row-major entries.
    pub fn new(n: usize, data: Vec<C64>) -> Result<Self> {
        if n == 0 || data.len() != 1usize << (2 * n) {
            return Err(Error::InvalidState(format!(
                "{} entries do not form a {n}-qubit density matrix",
                data.len()
            )));
        }
        let rho = Self { n, data };
        rho.validate()?;
        Ok(rho)
    }

    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        let n = super::arity_of(m.nrows())?;
        if m.nrows() != m.ncols() {
            return Err(Error::Dimension {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let dim = m.nrows();
        let data = (0..dim * dim).map(|i| m[(i / dim, i % dim)]).collect();
        Self::new(n, data)
    }

    pub fn from_pure(psi: &Statevector) -> Self {
        let a = psi.amplitudes();
        let data = a
            .iter()
            .flat_map(|r| a.iter().map(move |c| r * c.conj()))
            .collect();
        Self { n: psi.n(), data }
    }

    pub fn basis(n: usize, index: usize) -> Result<Self> {
        Ok(Self::from_pure(&Statevector::basis(n, index)?))
    }

    /// `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Self {
        let dim = 1usize << n;
        let mut data = vec![C64::default(); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = C64::new(1.0 / dim as f64, 0.0);
        }
        Self { n, data }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn data(&self) -> &[C64] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut [C64] {
        &mut self.data
    }

    pub fn get(&self, row: usize, col: usize) -> C64 {
        self.data[row * self.dim() + col]
    }

    pub fn to_matrix(&self) -> Matrix {
        let dim = self.dim();
        Matrix::from_row_slice(dim, dim, &self.data)
    }

    pub fn trace(&self) -> C64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut ev: Vec<f64> = SymmetricEigen::new(self.to_matrix())
            .eigenvalues
            .iter()
            .copied()
            .collect();
        ev.sort_by(f64::total_cmp);
        ev
    }

    pub fn validate(&self) -> Result<()> {
        let dim = self.dim();
        for r in 0..dim {
            for c in r..dim {
                let d = (self.data[r * dim + c] - self.data[c * dim + r].conj()).norm();
                if d > tolerances::STRUCTURAL {
                    return Err(Error::InvalidState(format!(
                        "not Hermitian at ({r},{c}): {d:.3e}"
                    )));
                }
            }
        }
        let tr = self.trace();
        if (tr - C64::new(1.0, 0.0)).norm() > tolerances::STRUCTURAL {
            return Err(Error::InvalidState(format!("trace {tr} != 1")));
        }
        let min = self.eigenvalues()[0];
        if min < tolerances::EIGEN_FLOOR {
            return Err(Error::InvalidState(format!(
                "negative eigenvalue {min:.3e}"
            )));
        }
        Ok(())
    }

    pub fn apply_unitary(&self, gate: &Matrix, targets: &[usize]) -> Result<Self> {
        check_unitary(gate)?;
        let k = super::arity_of(gate.nrows())?;
        check_targets(targets, self.n, k)?;
        let mut out = self.clone();
        out.conjugate_in_place(gate, targets);
        Ok(out)
    }

    /// `rho -> m rho m^dag` without validation.
    pub(crate) fn conjugate_in_place(&mut self, m: &Matrix, targets: &[usize]) {
        kernel::conjugate(&mut self.data, self.n, m, targets);
    }

    /// Reduced state on `keep`; qubit `keep[j]` becomes qubit `j`.
    pub fn partial_trace(&self, keep: &[usize]) -> Result<Self> {
        if keep.is_empty() {
            return Err(Error::arg(
                "partial trace needs a nonempty set of kept qubits",
            ));
        }
        check_targets(keep, self.n, keep.len())?;
        let traced: Vec<usize> = (0..self.n).filter(|q| !keep.contains(q)).collect();
        let ka = keep.len();
        let da = 1usize << ka;
        let dim = self.dim();
        let keep_off: Vec<usize> = (0..da).map(|l| kernel::scatter_bits(l, keep)).collect();
        let env_off: Vec<usize> = (0..1usize << traced.len())
            .map(|l| kernel::scatter_bits(l, &traced))
            .collect();
        let mut out = vec![C64::default(); da * da];
        for (a, &ra) in keep_off.iter().enumerate() {
            for (b, &cb) in keep_off.iter().enumerate() {
                out[a * da + b] = env_off
                    .iter()
                    .map(|&e| self.data[(ra | e) * dim + (cb | e)])
                    .sum();
            }
        }
        Ok(Self { n: ka, data: out })
    }

    /// `Tr[rho^2]`.
    pub fn purity(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum()
    }

    pub(crate) fn pauli_expectation(&self, s: &PauliString) -> C64 {
        let dim = self.dim();
        let x = s.x_mask();
        (0..dim)
            .map(|b| s.phase(b) * self.data[b * dim + (b ^ x)])
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

    /// Diagonal of `rho`, clipped at zero.
    pub fn probabilities(&self) -> Result<Vec<f64>> {
        let dim = self.dim();
        (0..dim)
            .map(|i| {
                let p = self.data[i * dim + i].re;
                if p < -tolerances::NEGATIVE_PROBABILITY {
                    Err(Error::InvalidState(format!("negative probability {p:.3e}")))
                } else {
                    Ok(p.max(0.0))
                }
            })
            .collect()
    }

    /// Second-order Rényi entropy `-log2 Tr[rho^2]` in bits.
    pub fn renyi2(&self) -> f64 {
        (-self.purity().log2()).max(0.0)
    }

    /// `(1 - w) self + w other`.
    pub fn mix(&self, other: &DensityMatrix, w: f64) -> Result<Self> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * (1.0 - w) + b * w)
            .collect();
        Ok(Self { n: self.n, data })
    }

    /// Trace distance `||a - b||_1 / 2`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        let diff = self.to_matrix() - other.to_matrix();
        Ok(SymmetricEigen::new(diff)
            .eigenvalues
            .iter()
            .map(|e| e.abs())
            .sum::<f64>()
            / 2.0)
    }

    /// Hilbert-Schmidt inner product `Tr[a b]` for Hermitian arguments.
    pub fn overlap(&self, other: &DensityMatrix) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: other.n,
            });
        }
        // Tr[a b] = sum_rc a_rc b_cr = sum_rc a_rc conj(b_rc)
        Ok(self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a * b.conj()).re)
            .sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{Pauli, PauliString};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
        let amps = (0..1 << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        Statevector::normalized(amps).unwrap()
    }

    fn bell() -> DensityMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        DensityMatrix::from_pure(&Statevector::new(vec![c(h), c(0.0), c(0.0), c(h)]).unwrap())
    }

    /// Direct index contraction: (rho_A)_{ab} = sum_e rho_{(a,e),(b,e)}.
    fn brute_force_reduce(rho: &Matrix, n: usize, keep: &[usize]) -> Matrix {
        let da = 1 << keep.len();
        let mut out = Matrix::zeros(da, da);
        for r in 0..1usize << n {
            for col in 0..1usize << n {
                let env_r: Vec<_> = (0..n)
                    .filter(|q| !keep.contains(q))
                    .map(|q| r >> q & 1)
                    .collect();
                let env_c: Vec<_> = (0..n)
                    .filter(|q| !keep.contains(q))
                    .map(|q| col >> q & 1)
                    .collect();
                if env_r != env_c {
                    continue;
                }
                let a: usize = keep
                    .iter()
                    .enumerate()
                    .map(|(j, &q)| (r >> q & 1) << j)
                    .sum();
                let b: usize = keep
                    .iter()
                    .enumerate()
                    .map(|(j, &q)| (col >> q & 1) << j)
                    .sum();
                out[(a, b)] += rho[(r, col)];
            }
        }
        out
    }

    #[test]
    fn bell_half_is_maximally_mixed() {
        let r = bell().partial_trace(&[0]).unwrap();
        assert!((r.to_matrix() - DensityMatrix::maximally_mixed(1).to_matrix()).camax() < 1e-15);
        assert!((bell().partial_trace(&[1]).unwrap().purity() - 0.5).abs() < 1e-15);
    }

    #[test]
    fn product_state_reduces_to_factor() {
        // |01> in reading order: qubit 0 in |0>, qubit 1 in |1>, index 0b10
        let rho = DensityMatrix::basis(2, 0b10).unwrap();
        let r = rho.partial_trace(&[1]).unwrap();
        assert!((r.get(1, 1) - c(1.0)).norm() < 1e-15);
        assert!(r.get(0, 0).norm() < 1e-15);
    }

    #[test]
    fn partial_trace_matches_index_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let rho = DensityMatrix::from_pure(&random_state(4, &mut rng));
        for keep in [vec![0, 1], vec![2, 0], vec![3]] {
            let fast = rho.partial_trace(&keep).unwrap();
            let slow = brute_force_reduce(&rho.to_matrix(), 4, &keep);
            assert!((fast.to_matrix() - &slow).camax() < 1e-14);
            let slow_purity: f64 = slow.iter().map(|z| z.norm_sqr()).sum();
            assert!((fast.purity() - slow_purity).abs() < 1e-14);
        }
    }

    #[test]
    fn partial_trace_rejects_empty() {
        assert!(bell().partial_trace(&[]).is_err());
        assert!(bell().partial_trace(&[2]).is_err());
    }

    #[test]
    fn purity_bounds_and_renyi() {
        assert!((bell().purity() - 1.0).abs() < 1e-14);
        assert!(bell().renyi2().abs() < 1e-14);
        for n in 1..5 {
            let mm = DensityMatrix::maximally_mixed(n);
            assert!((mm.purity() - 0.5f64.powi(n as i32)).abs() < 1e-15);
        }
        assert!((DensityMatrix::maximally_mixed(1).renyi2() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ghz_half_chain_entropy_is_one_bit() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![c(0.0); 16];
        amps[0] = c(h);
        amps[15] = c(h);
        let rho = DensityMatrix::from_pure(&Statevector::new(amps).unwrap());
        let half = rho.partial_trace(&[0, 1]).unwrap();
        assert!((half.purity() - 0.5).abs() < 1e-14);
        assert!((half.renyi2() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn ansatz_purity_matches_closed_form() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let pure = DensityMatrix::from_pure(&random_state(3, &mut rng));
        let p: f64 = 0.3;
        let rho = pure.mix(&DensityMatrix::maximally_mixed(3), p).unwrap();
        let closed = (1.0 - p).powi(2) + p * (1.0 - p) / 4.0 + p * p / 8.0;
        assert!((rho.purity() - closed).abs() < 1e-12);
    }

    #[test]
    fn expectation_basics() {
        let z = crate::qstate::PauliObservable::z(1, 0);
        assert!((DensityMatrix::basis(1, 0).unwrap().expectation(&z).unwrap() - 1.0).abs() < 1e-15);
        let z2 = crate::qstate::PauliObservable::z(3, 2);
        assert!(
            DensityMatrix::maximally_mixed(3)
                .expectation(&z2)
                .unwrap()
                .abs()
                < 1e-15
        );
        assert!(DensityMatrix::maximally_mixed(2).expectation(&z2).is_err());
    }

    #[test]
    fn expectation_matches_dense_trace() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let psi = random_state(3, &mut rng);
        let rho = DensityMatrix::from_pure(&psi);
        for s in ["XYZ", "YYI", "IZX", "III"] {
            let s: PauliString = s.parse().unwrap();
            let dense = (s.matrix() * rho.to_matrix()).trace();
            assert!((rho.pauli_expectation(&s) - dense).norm() < 1e-13);
            assert!((psi.pauli_expectation(&s) - dense).norm() < 1e-13);
        }
    }

    #[test]
    fn validate_catches_bad_input() {
        let bad = vec![c(0.5), c(0.7), c(0.0), c(0.5)];
        assert!(DensityMatrix::new(1, bad).is_err());
        let neg = vec![c(1.5), c(0.0), c(0.0), c(-0.5)];
        assert!(DensityMatrix::new(1, neg).is_err());
        assert!(DensityMatrix::new(1, vec![c(1.0), c(0.0), c(0.0), c(0.0)]).is_ok());
    }

    #[test]
    fn x_flips_qubit_zero() {
        let x = Pauli::X.matrix();
        let psi = Statevector::zero(2)
            .unwrap()
            .apply_unitary(&x, &[0])
            .unwrap();
        assert!((psi.amplitudes()[1] - c(1.0)).norm() < 1e-15);
        let rho = DensityMatrix::basis(2, 0)
            .unwrap()
            .apply_unitary(&x, &[0])
            .unwrap();
        assert!((rho.get(1, 1) - c(1.0)).norm() < 1e-15);
    }

    #[test]
    fn rejects_non_unitary_and_bad_targets() {
        let m = Matrix::from_element(2, 2, c(1.0));
        let rho = DensityMatrix::basis(2, 0).unwrap();
        assert!(matches!(
            rho.apply_unitary(&m, &[0]),
            Err(Error::NotUnitary(_))
        ));
        let x = Pauli::X.matrix();
        assert!(matches!(
            rho.apply_unitary(&x, &[2]),
            Err(Error::QubitOutOfRange { .. })
        ));
    }
}
