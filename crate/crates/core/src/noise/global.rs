use crate::qstate::DensityMatrix;
use crate::{Error, Result};

fn check_p(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(Error::Probability(p))
    }
}

/// `(1 - p) rho + p I/2^n`.
pub fn global_depolarize(rho: &DensityMatrix, p_tot: f64) -> Result<DensityMatrix> {
    check_p(p_tot)?;
    rho.mix(&DensityMatrix::maximally_mixed(rho.n()), p_tot)
}

/// `1 - prod (1 - p_l)`.
pub fn compose_global(ps: &[f64]) -> Result<f64> {
    let mut keep = 1.0;
    for &p in ps {
        check_p(p)?;
        keep *= 1.0 - p;
    }
    Ok(1.0 - keep)
}

/// Whole-register error probability with optional per-layer and per-gate
/// breakdowns.
#[derive(Debug, Clone, PartialEq)]
pub struct GlobalDepolarizingParams {
    pub p_tot: f64,
    pub layers: Option<Vec<f64>>,
    pub gates: Option<Vec<f64>>,
}

impl GlobalDepolarizingParams {
    pub fn new(p_tot: f64) -> Result<Self> {
        check_p(p_tot)?;
        Ok(Self {
            p_tot,
            layers: None,
            gates: None,
        })
    }

    /// `p_tot` composed from effective per-layer probabilities.
    pub fn from_layers(layers: Vec<f64>) -> Result<Self> {
        let p_tot = compose_global(&layers)?;
        Ok(Self {
            p_tot,
            layers: Some(layers),
            gates: None,
        })
    }

    /// Attaches per-gate probabilities, whose composition is only a
    /// zeroth-order estimate of `p_tot` and is not required to match it.
    pub fn with_gates(mut self, gates: Vec<f64>) -> Result<Self> {
        gates.iter().try_for_each(|&p| check_p(p))?;
        self.gates = Some(gates);
        Ok(self)
    }

    pub fn gate_estimate(&self) -> Option<f64> {
        self.gates
            .as_deref()
            .map(|g| compose_global(g).expect("validated"))
    }

    pub fn validate(&self) -> Result<()> {
        check_p(self.p_tot)?;
        if let Some(layers) = &self.layers {
            let composed = compose_global(layers)?;
            if (composed - self.p_tot).abs() > 1e-12 {
                return Err(Error::arg(format!(
                    "layer product gives {composed}, p_tot is {}",
                    self.p_tot
                )));
            }
        }
        if let Some(g) = &self.gates {
            g.iter().try_for_each(|&p| check_p(p))?;
        }
        Ok(())
    }
}

/// Least-squares fit of `noisy` to `(1 - p) exact + p I/2^n` in the
/// Hilbert-Schmidt norm. Returns the fitted `p` (clamped to `[0, 1]`) and the
/// trace distance to the fitted state.
pub fn best_fit_global(noisy: &DensityMatrix, exact: &DensityMatrix) -> Result<(f64, f64)> {
    let mixed = DensityMatrix::maximally_mixed(exact.n());
    // noisy - exact = -p (exact - mixed)
    let a_aa = exact.purity() - 2.0 * exact.overlap(&mixed)? + mixed.purity();
    let r_a =
        noisy.overlap(exact)? - noisy.overlap(&mixed)? - exact.purity() + exact.overlap(&mixed)?;
    let p = if a_aa > 0.0 {
        (-r_a / a_aa).clamp(0.0, 1.0)
    } else {
        0.0
    };
    let fitted = global_depolarize(exact, p)?;
    Ok((p, noisy.trace_distance(&fitted)?))
}
