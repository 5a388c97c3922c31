use serde::{Deserialize, Serialize};

use super::{Circuit, Gate};
use crate::qstate::{Pauli, PauliObservable, PauliString, Statevector};
use crate::{Error, Result};

/// Open Ising chain `H = -J [ sum Z_i Z_{i+1} + hx sum X_i + hz sum Z_i ]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TfimParams {
    pub n: usize,
    #[serde(default = "one")]
    pub j: f64,
    pub hx: f64,
    #[serde(default)]
    pub hz: f64,
}

fn one() -> f64 {
    1.0
}

impl TfimParams {
    pub fn new(n: usize, j: f64, hx: f64, hz: f64) -> Result<Self> {
        let p = Self { n, j, hx, hz };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 2 || self.n > 63 {
            return Err(Error::arg(format!(
                "Ising chain needs 2..=63 spins, got {}",
                self.n
            )));
        }
        if !(self.j > 0.0) || !self.hx.is_finite() || !self.hz.is_finite() {
            return Err(Error::arg("require J > 0 and finite fields"));
        }
        Ok(())
    }
}

pub fn tfim_hamiltonian(p: &TfimParams) -> Result<PauliObservable> {
    p.validate()?;
    let n = p.n;
    let mut terms = Vec::with_capacity(3 * n);
    for i in 0..n - 1 {
        terms.push((
            -p.j,
            PauliString::single(n, i, Pauli::Z).with(i + 1, Pauli::Z),
        ));
    }
    if p.hx != 0.0 {
        terms.extend((0..n).map(|i| (-p.j * p.hx, PauliString::single(n, i, Pauli::X))));
    }
    if p.hz != 0.0 {
        terms.extend((0..n).map(|i| (-p.j * p.hz, PauliString::single(n, i, Pauli::Z))));
    }
    PauliObservable::new(n, terms)
}

/// First-order Trotter circuit for `exp(-i H t)` in `steps` steps.
///
/// Each step applies the Ising bonds (even bonds, then odd bonds, each as
/// CNOT, Rz, CNOT), then `rx` on every site, then `rz` on every site. Field
/// layers whose coefficient is exactly zero are omitted, so the gate
/// structure depends on the parameters but never on `t`.
pub fn build_tfim_trotter(p: &TfimParams, t: f64, steps: usize) -> Result<Circuit> {
    p.validate()?;
    if steps == 0 {
        return Err(Error::arg("Trotter step count must be at least 1"));
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::arg(format!(
            "evolution time must be finite and >= 0, got {t}"
        )));
    }
    let n = p.n;
    let dt = t / steps as f64;
    let zz = -2.0 * p.j * dt;
    let ax = -2.0 * p.j * p.hx * dt;
    let az = -2.0 * p.j * p.hz * dt;
    let mut c = Circuit::new(n)?;
    for _ in 0..steps {
        for parity in 0..2 {
            let bonds: Vec<usize> = (parity..n - 1).step_by(2).collect();
            if bonds.is_empty() {
                continue;
            }
            c.push_layer(bonds.iter().map(|&i| Gate::cnot(i, i + 1)).collect())?;
            c.push_layer(bonds.iter().map(|&i| Gate::rz(i + 1, zz)).collect())?;
            c.push_layer(bonds.iter().map(|&i| Gate::cnot(i, i + 1)).collect())?;
        }
        if p.hx != 0.0 {
            c.push_layer((0..n).map(|i| Gate::rx(i, ax)).collect())?;
        }
        if p.hz != 0.0 {
            c.push_layer((0..n).map(|i| Gate::rz(i, az)).collect())?;
        }
    }
    Ok(c)
}

/// Basis index with the listed spins flipped from the all-up (`|0...0>`)
/// background.
pub fn basis_index(n: usize, flips: &[usize]) -> Result<usize> {
    let mut idx = 0usize;
    for &f in flips {
        if f >= n {
            return Err(Error::QubitOutOfRange { index: f, n });
        }
        idx ^= 1 << f;
    }
    Ok(idx)
}

/// Computational-basis initial state with spin flips at `flips`.
pub fn domain_state(n: usize, flips: &[usize]) -> Result<Statevector> {
    Statevector::basis(n, basis_index(n, flips)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuits::ed::{ed_evolve, Spectrum};
    use crate::qstate::DensityMatrix;
    use crate::C64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn single_bond_spectrum() {
        let p = TfimParams::new(2, 1.0, 0.0, 0.0).unwrap();
        let h = tfim_hamiltonian(&p).unwrap();
        let m = h.matrix();
        let diag: Vec<f64> = (0..4).map(|i| m[(i, i)].re).collect();
        assert_eq!(diag, vec![-1.0, 1.0, 1.0, -1.0]);
        assert_eq!(h.trace(), 0.0);
    }

    #[test]
    fn basis_state_energy() {
        // three aligned bonds, transverse field has no diagonal part
        let p = TfimParams::new(4, 1.0, 0.5, 0.0).unwrap();
        let h = tfim_hamiltonian(&p).unwrap();
        let e = DensityMatrix::basis(4, 0).unwrap().expectation(&h).unwrap();
        assert!((e + 3.0).abs() < 1e-14);
    }

    #[test]
    fn two_site_spectrum_matches_hand_built_matrix() {
        let p = TfimParams::new(2, 1.0, 0.5, 0.0).unwrap();
        let x = Pauli::X.matrix();
        let z = Pauli::Z.matrix();
        let id = crate::qstate::Matrix::identity(2, 2);
        let hand = -(z.kronecker(&z) + (x.kronecker(&id) + id.kronecker(&x)) * C64::new(0.5, 0.0));
        let mut want: Vec<f64> = nalgebra::SymmetricEigen::new(hand)
            .eigenvalues
            .iter()
            .copied()
            .collect();
        want.sort_by(f64::total_cmp);
        let got = Spectrum::of(&tfim_hamiltonian(&p).unwrap()).unwrap();
        for (a, b) in got.energies().iter().zip(&want) {
            assert!((a - b).abs() < 1e-12);
        }
        // closed form: E = -+sqrt(1 + 4 hx^2) and -+1
        let s = (1.0f64 + 1.0).sqrt();
        assert!((got.energies()[0] + s).abs() < 1e-12);
    }

    #[test]
    fn cnot_count_formula() {
        for n in 2..9 {
            for steps in 1..8 {
                let p = TfimParams::new(n, 1.0, 0.5, 0.75).unwrap();
                let c = build_tfim_trotter(&p, 1.0, steps).unwrap();
                assert_eq!(c.cnot_count(), 2 * (n - 1) * steps);
            }
        }
        let p = TfimParams::new(5, 1.0, 0.5, 0.75).unwrap();
        assert_eq!(build_tfim_trotter(&p, 1.0, 6).unwrap().cnot_count(), 48);
    }

    #[test]
    fn zero_steps_rejected() {
        let p = TfimParams::new(3, 1.0, 0.5, 0.0).unwrap();
        assert!(build_tfim_trotter(&p, 1.0, 0).is_err());
        assert!(build_tfim_trotter(&p, -1.0, 2).is_err());
        assert!(TfimParams::new(1, 1.0, 0.5, 0.0).is_err());
        assert!(TfimParams::new(3, 0.0, 0.5, 0.0).is_err());
    }

    #[test]
    fn zero_time_is_identity() {
        let p = TfimParams::new(4, 1.0, 0.5, 0.75).unwrap();
        let c = build_tfim_trotter(&p, 0.0, 3).unwrap();
        let rho = c
            .apply_to_density(&DensityMatrix::basis(4, 0).unwrap())
            .unwrap();
        for i in 0..4 {
            let z = rho.expectation(&PauliObservable::z(4, i)).unwrap();
            assert!((z - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn trotter_tracks_exact_magnetization() {
        let p = TfimParams::new(4, 1.0, 0.5, 0.0).unwrap();
        let psi0 = Statevector::zero(4).unwrap();
        let t = 0.5;
        let exact = &ed_evolve(&p, &psi0, &[t]).unwrap()[0];
        let trot = build_tfim_trotter(&p, t, 20)
            .unwrap()
            .apply_to_statevector(&psi0)
            .unwrap();
        let obs = PauliObservable::z(4, 2);
        let d = exact.expectation(&obs).unwrap() - trot.expectation(&obs).unwrap();
        assert!(d.abs() < 0.01, "deviation {d}");
    }

    #[test]
    fn trotter_error_shrinks_with_steps() {
        let p = TfimParams::new(4, 1.0, 0.7, 0.4).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let states: Vec<Statevector> = (0..4)
            .map(|_| {
                Statevector::normalized(
                    (0..16)
                        .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
                        .collect(),
                )
                .unwrap()
            })
            .collect();
        let t = 1.0;
        let spectrum = Spectrum::of(&tfim_hamiltonian(&p).unwrap()).unwrap();
        let mut last = f64::INFINITY;
        for steps in [2, 4, 8, 16] {
            let c = build_tfim_trotter(&p, t, steps).unwrap();
            let err = states
                .iter()
                .map(|s| {
                    let a = c.apply_to_statevector(s).unwrap();
                    let b = spectrum.evolve(s, t).unwrap();
                    1.0 - a.inner(&b).unwrap().norm()
                })
                .fold(0.0, f64::max);
            assert!(err < last, "steps {steps}: {err} !< {last}");
            last = err;
        }
    }

    #[test]
    fn domain_states() {
        assert_eq!(basis_index(7, &[3]).unwrap(), 8);
        assert_eq!(basis_index(7, &[2, 3, 4]).unwrap(), 0b11100);
        assert!(domain_state(3, &[3]).is_err());
    }
}
