//! Dense quantum states and Pauli observables.
//!
//! Both [`Statevector`] and [`DensityMatrix`] are stored densely. A density
//! matrix of `n` qubits costs `16 * 4^n` bytes, so the practical ceiling is
//! around 10 to 12 qubits; everything in this crate stays at or below 8.

mod density;
pub(crate) mod kernel;
mod pauli;
mod statevector;

pub use density::DensityMatrix;
pub use pauli::{Pauli, PauliObservable, PauliString};
pub use statevector::Statevector;

use nalgebra::DMatrix;

use crate::{tolerances, Error, Result, C64};

/// Complex matrix used for gates and Kraus operators.
pub type Matrix = DMatrix<C64>;

/// Checks that `u` is square and unitary to the structural tolerance.
pub fn check_unitary(u: &Matrix) -> Result<()> {
    if u.nrows() != u.ncols() {
        return Err(Error::Dimension {
            expected: u.nrows(),
            got: u.ncols(),
        });
    }
    let dev = (u.adjoint() * u - Matrix::identity(u.nrows(), u.ncols())).camax();
    if dev > tolerances::STRUCTURAL {
        return Err(Error::NotUnitary(dev));
    }
    Ok(())
}

/// Validates a list of target qubits against a register of `n` qubits and a
/// matrix acting on `k` qubits.
pub(crate) fn check_targets(targets: &[usize], n: usize, k: usize) -> Result<()> {
    if targets.len() != k {
        return Err(Error::Dimension {
            expected: k,
            got: targets.len(),
        });
    }
    for (i, &t) in targets.iter().enumerate() {
        if t >= n {
            return Err(Error::QubitOutOfRange { index: t, n });
        }
        if targets[..i].contains(&t) {
            return Err(Error::DuplicateQubit(t));
        }
    }
    Ok(())
}

/// Number of qubits a square matrix of dimension `dim` acts on.
pub(crate) fn arity_of(dim: usize) -> Result<usize> {
    if dim == 0 || !dim.is_power_of_two() {
        return Err(Error::arg(format!(
            "matrix dimension {dim} is not a power of two"
        )));
    }
    Ok(dim.trailing_zeros() as usize)
}
