use super::NoiseModel;
use crate::circuits::Circuit;
use crate::qstate::DensityMatrix;
use crate::{Error, Result};

/// Executes `circ` on `rho0` with each gate followed by its attached
/// channels. Preparation noise acts on every qubit first and measurement
/// noise on every qubit last. `rzz` gates are compiled to CNOT, Rz, CNOT.
pub fn run_noisy(circ: &Circuit, nm: &NoiseModel, rho0: &DensityMatrix) -> Result<DensityMatrix> {
    if circ.n() != rho0.n() {
        return Err(Error::Dimension {
            expected: circ.n(),
            got: rho0.n(),
        });
    }
    let compiled = circ.compile();
    let mut rho = rho0.clone();
    if let Some(prep) = nm.prep() {
        for q in 0..rho.n() {
            prep.apply_in_place(&mut rho, &[q]);
        }
    }
    for layer in compiled.layers() {
        for g in layer {
            rho.conjugate_in_place(&g.matrix(), &g.qubits);
            for (ch, targets) in nm.channels_for(g) {
                ch.apply_in_place(&mut rho, &targets);
            }
        }
    }
    if let Some(meas) = nm.measure() {
        for q in 0..rho.n() {
            meas.apply_in_place(&mut rho, &[q]);
        }
    }
    Ok(rho)
}
