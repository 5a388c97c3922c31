use super::{Circuit, Gate};
use crate::{Error, Result};

/// Number of angles consumed by [`build_brickwork`].
pub fn brickwork_angle_count(n: usize, depth: usize) -> usize {
    3 * n * (depth + 1)
}

/// Alternating `u3` and CNOT layers with a final `u3` layer.
///
/// Entangling layer `l` uses bonds `(i, i+1)` with `i % 2 == l % 2`; on two
/// qubits every entangling layer uses the only bond. Angles are consumed layer
/// by layer, qubit by qubit, as `(theta, phi, lambda)`.
pub fn build_brickwork(n: usize, depth: usize, angles: &[f64]) -> Result<Circuit> {
    let want = brickwork_angle_count(n, depth);
    if angles.len() != want {
        return Err(Error::arg(format!(
            "brickwork needs {want} angles, got {}",
            angles.len()
        )));
    }
    if depth > 0 && n < 2 {
        return Err(Error::arg("entangling layers need at least two qubits"));
    }
    let mut c = Circuit::new(n)?;
    let mut chunks = angles.chunks_exact(3);
    let mut u3_layer = |c: &mut Circuit| -> Result<()> {
        let layer = (0..n)
            .map(|q| {
                let a = chunks.next().expect("angle count checked");
                Gate::u3(q, a[0], a[1], a[2])
            })
            .collect();
        c.push_layer(layer)
    };
    for l in 0..depth {
        u3_layer(&mut c)?;
        let parity = if n == 2 { 0 } else { l % 2 };
        c.push_layer(
            (parity..n - 1)
                .step_by(2)
                .map(|i| Gate::cnot(i, i + 1))
                .collect(),
        )?;
    }
    u3_layer(&mut c)?;
    Ok(c)
}
