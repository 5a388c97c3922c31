//! Exact diagonalization of small Hamiltonians.

use nalgebra::{DVector, SymmetricEigen};
use rayon::prelude::*;

use super::{tfim_hamiltonian, TfimParams};
use crate::qstate::{Matrix, PauliObservable, Statevector};
use crate::{Error, Result, C64};

/// Largest register handled by dense diagonalization.
pub const MAX_ED_QUBITS: usize = 14;

/// Eigenvalues in ascending order and eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n: usize,
    energies: Vec<f64>,
    vectors: Matrix,
}

/// One frequency component `weight * cos(omega t + phase)` of an expectation
/// value, from the eigenpair `(lower, upper)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralLine {
    pub omega: f64,
    pub weight: f64,
    pub lower: usize,
    pub upper: usize,
}

impl Spectrum {
    pub fn of(h: &PauliObservable) -> Result<Self> {
        if h.n() > MAX_ED_QUBITS {
            return Err(Error::arg(format!(
                "dense diagonalization limited to {MAX_ED_QUBITS} qubits"
            )));
        }
        let eig = SymmetricEigen::new(h.matrix());
        let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let cols: Vec<_> = order
            .iter()
            .map(|&i| eig.eigenvectors.column(i).into_owned())
            .collect();
        Ok(Self {
            n: h.n(),
            energies,
            vectors: Matrix::from_columns(&cols),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn energies(&self) -> &[f64] {
        &self.energies
    }

    pub fn vectors(&self) -> &Matrix {
        &self.vectors
    }

    /// Spectral width `E_max - E_min`.
    pub fn width(&self) -> f64 {
        self.energies[self.energies.len() - 1] - self.energies[0]
    }

    /// `E_i - E_0` for the lowest `count` excited levels.
    pub fn gaps(&self, count: usize) -> Result<Vec<f64>> {
        if count == 0 || count >= self.energies.len() {
            return Err(Error::arg(format!(
                "gap count must be in 1..{}",
                self.energies.len()
            )));
        }
        let e0 = self.energies[0];
        Ok(self.energies[1..=count]
            .iter()
            .map(|e| (e - e0).max(0.0))
            .collect())
    }

    fn coefficients(&self, psi0: &Statevector) -> Result<DVector<C64>> {
        if psi0.n() != self.n {
            return Err(Error::Dimension {
                expected: self.n,
                got: psi0.n(),
            });
        }
        Ok(self.vectors.adjoint() * DVector::from_column_slice(psi0.amplitudes()))
    }

    pub fn evolve(&self, psi0: &Statevector, t: f64) -> Result<Statevector> {
        let c = self.coefficients(psi0)?;
        Ok(self.evolve_coefficients(&c, t))
    }

    fn evolve_coefficients(&self, c: &DVector<C64>, t: f64) -> Statevector {
        let phased = DVector::from_iterator(
            c.len(),
            c.iter()
                .zip(&self.energies)
                .map(|(a, e)| a * C64::from_polar(1.0, -e * t)),
        );
        let amps = &self.vectors * phased;
        Statevector::from_raw(self.n, amps.iter().copied().collect())
    }

    pub fn evolve_many(&self, psi0: &Statevector, times: &[f64]) -> Result<Vec<Statevector>> {
        let c = self.coefficients(psi0)?;
        Ok(times
            .par_iter()
            .map(|&t| self.evolve_coefficients(&c, t))
            .collect())
    }

    /// Frequency components of `<obs>(t)` for the initial state, strongest
    /// first. Degenerate frequencies (within `1e-9`) are merged, keeping the
    /// eigenpair of the largest contribution.
    pub fn spectral_lines(
        &self,
        psi0: &Statevector,
        obs: &PauliObservable,
    ) -> Result<Vec<SpectralLine>> {
        let c = self.coefficients(psi0)?;
        let o = self.vectors.adjoint() * obs.matrix() * &self.vectors;
        let dim = self.energies.len();
        let mut raw: Vec<SpectralLine> = Vec::new();
        for a in 0..dim {
            if c[a].norm() < 1e-12 {
                continue;
            }
            for b in a + 1..dim {
                let w = 2.0 * (c[a].conj() * c[b] * o[(a, b)]).norm();
                let omega = self.energies[b] - self.energies[a];
                if w > 1e-12 && omega > 1e-9 {
                    raw.push(SpectralLine {
                        omega,
                        weight: w,
                        lower: a,
                        upper: b,
                    });
                }
            }
        }
        raw.sort_by(|x, y| x.omega.total_cmp(&y.omega));
        let mut merged: Vec<(SpectralLine, f64)> = Vec::new();
        for line in raw {
            match merged.last_mut() {
                Some((best, total)) if (line.omega - best.omega).abs() < 1e-9 => {
                    *total += line.weight;
                    if line.weight > best.weight {
                        *best = line;
                    }
                }
                _ => merged.push((line, line.weight)),
            }
        }
        let mut lines: Vec<SpectralLine> = merged
            .into_iter()
            .map(|(l, total)| SpectralLine { weight: total, ..l })
            .collect();
        lines.sort_by(|x, y| y.weight.total_cmp(&x.weight));
        Ok(lines)
    }
}

/// `|psi(t)> = exp(-i H t) |psi0>` for the Ising chain at each time.
pub fn ed_evolve(p: &TfimParams, psi0: &Statevector, times: &[f64]) -> Result<Vec<Statevector>> {
    if psi0.n() != p.n {
        return Err(Error::Dimension {
            expected: p.n,
            got: psi0.n(),
        });
    }
    Spectrum::of(&tfim_hamiltonian(p)?)?.evolve_many(psi0, times)
}

/// Lowest `count` excitation energies `E_i - E_0` of the Ising chain.
pub fn ed_energy_gaps(p: &TfimParams, count: usize) -> Result<Vec<f64>> {
    Spectrum::of(&tfim_hamiltonian(p)?)?.gaps(count)
}
