use crate::{Error, Result};

/// How the purity uncertainty maps onto `p_tot`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SigmaMode {
    /// `sigma_T / |dT/dp|` with `|dT/dp| = 2 (1 - p) (1 - 2^-n)`.
    #[default]
    Implicit,
    /// `(1 - p) sigma_T / (2 (2^n - T))`, kept as an alternative.
    Printed,
}

fn check_open(p: f64) -> Result<()> {
    if !(0.0..1.0).contains(&p) {
        return Err(if p == 1.0 {
            Error::FullyDepolarized
        } else {
            Error::Probability(p)
        });
    }
    Ok(())
}

/// Uncertainty of `p_tot` from uncertainty `sigma_t` of the measured purity `t`.
pub fn delta_ptot(p: f64, sigma_t: f64, n: usize, t: f64, mode: SigmaMode) -> Result<f64> {
    check_open(p)?;
    let dim = 2f64.powi(n as i32);
    Ok(match mode {
        SigmaMode::Implicit => sigma_t / (2.0 * (1.0 - p) * (1.0 - 1.0 / dim)),
        SigmaMode::Printed => (1.0 - p) * sigma_t / (2.0 * (dim - t)),
    })
}

/// `sigma_meas / (1 - p) + sigma_p |measured - Tr[O]/2^n| / (1 - p)^2`.
pub fn delta_expectation(
    sigma_meas: f64,
    p: f64,
    sigma_p: f64,
    measured: f64,
    mixed_value: f64,
) -> Result<f64> {
    check_open(p)?;
    let keep = 1.0 - p;
    Ok(sigma_meas / keep + sigma_p * (measured - mixed_value).abs() / (keep * keep))
}

/// Uncertainty of the inverted subsystem purity
/// `2^-nA + (T_A - 2^-nA) / (1 - p)^2`, adding the two linear terms.
pub fn delta_renyi(t_a: f64, sigma_t: f64, n_a: usize, p: f64, sigma_p: f64) -> Result<f64> {
    check_open(p)?;
    let d = 0.5f64.powi(n_a as i32);
    let keep = 1.0 - p;
    Ok(sigma_t / (keep * keep) + 2.0 * sigma_p * (t_a - d).abs() / keep.powi(3))
}
