use rand::Rng;
use rand_distr::{Binomial, Distribution};

use crate::qstate::{DensityMatrix, PauliObservable};
use crate::Result;

/// Shot-noise estimate of `<obs>` from `shots` single-shot measurements of
/// every Pauli term. Returns the estimate and its standard error; with
/// `shots == 0` the exact value and zero are returned.
pub fn sample_expectation(
    rho: &DensityMatrix,
    obs: &PauliObservable,
    shots: u64,
    rng: &mut impl Rng,
) -> Result<(f64, f64)> {
    if shots == 0 {
        return Ok((rho.expectation(obs)?, 0.0));
    }
    let mut value = 0.0;
    let mut var = 0.0;
    for (c, s) in obs.terms() {
        if s.is_identity() {
            value += c * rho.trace().re;
            continue;
        }
        let exact = rho.expectation(&PauliObservable::single(1.0, *s))?;
        let up = ((1.0 + exact) / 2.0).clamp(0.0, 1.0);
        let k = Binomial::new(shots, up)
            .expect("valid binomial")
            .sample(rng);
        let est = 2.0 * k as f64 / shots as f64 - 1.0;
        value += c * est;
        // one pseudo-count keeps the error of a saturated estimate nonzero
        var += c * c * (1.0 - est * est).max(1.0 / shots as f64) / shots as f64;
    }
    Ok((value, var.sqrt()))
}
