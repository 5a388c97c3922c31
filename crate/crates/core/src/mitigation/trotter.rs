use serde::{Deserialize, Serialize};

use super::Calibration;
use crate::{Error, Result};

/// Per-step error `p_T` with `1 - p_tot(N_T) = (1 - p_T)^N_T`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterFit {
    pub p_step: f64,
    /// Uncertainty of `p_step` from the input sigmas (zero if none given).
    pub sigma_step: f64,
    pub points: Vec<(usize, f64)>,
}

impl TrotterFit {
    /// `1 - (1 - p_T)^N_T`.
    pub fn predict(&self, n_t: usize) -> f64 {
        1.0 - (1.0 - self.p_step).powi(n_t as i32)
    }

    /// Uncertainty of [`Self::predict`].
    pub fn predict_sigma(&self, n_t: usize) -> f64 {
        n_t as f64 * (1.0 - self.p_step).powi(n_t as i32 - 1) * self.sigma_step
    }

    /// Calibration for a circuit of `n_t` steps derived from the fit.
    pub fn calibration(&self, n_t: usize, template: &Calibration) -> Result<Calibration> {
        let mut c = Calibration::new(
            self.predict(n_t),
            self.predict_sigma(n_t),
            template.method,
            template.n,
        )?
        .tagged(format!("nt={n_t}"))
        .at(template.timestamp);
        c.clamped = template.clamped;
        Ok(c)
    }
}

/// Least-squares fit of `log(1 - p_tot)` against `N_T` through the origin.
pub fn trotter_extrapolate(points: &[(usize, f64)]) -> Result<TrotterFit> {
    let with: Vec<(usize, f64, f64)> = points.iter().map(|&(n, p)| (n, p, 0.0)).collect();
    trotter_extrapolate_with_sigma(&with)
}

/// As [`trotter_extrapolate`], propagating each point's `sigma_p`.
pub fn trotter_extrapolate_with_sigma(points: &[(usize, f64, f64)]) -> Result<TrotterFit> {
    if points.is_empty() {
        return Err(Error::arg("need at least one calibration point"));
    }
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut var = 0.0;
    for &(n_t, p, s) in points {
        if n_t == 0 {
            return Err(Error::arg("Trotter step count must be positive"));
        }
        if p >= 1.0 {
            return Err(Error::FullyDepolarized);
        }
        if !(0.0..1.0).contains(&p) {
            return Err(Error::Probability(p));
        }
        let x = n_t as f64;
        sxy += x * (1.0 - p).ln();
        sxx += x * x;
        var += (x * s / (1.0 - p)).powi(2);
    }
    let slope = sxy / sxx;
    let p_step = 1.0 - slope.exp();
    let sigma_step = slope.exp() * var.sqrt() / sxx;
    Ok(TrotterFit {
        p_step,
        sigma_step,
        points: points.iter().map(|&(n, p, _)| (n, p)).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point() {
        let f = trotter_extrapolate(&[(5, 0.4)]).unwrap();
        assert!((f.p_step - (1.0 - 0.6f64.powf(0.2))).abs() < 1e-15);
        assert!((f.p_step - 0.09712).abs() < 1e-5);
        assert!((f.predict(10) - 0.64).abs() < 1e-12);
    }

    #[test]
    fn exact_points_recover_step() {
        let pts: Vec<(usize, f64)> = [3, 5, 6, 9]
            .iter()
            .map(|&n| (n, 1.0 - 0.95f64.powi(n as i32)))
            .collect();
        assert!((trotter_extrapolate(&pts).unwrap().p_step - 0.05).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_points() {
        assert!(trotter_extrapolate(&[]).is_err());
        assert!(matches!(
            trotter_extrapolate(&[(5, 1.0)]),
            Err(Error::FullyDepolarized)
        ));
        assert!(trotter_extrapolate(&[(0, 0.1)]).is_err());
    }

    #[test]
    fn sigma_matches_single_point_derivative() {
        // p_T = 1 - (1 - p)^(1/N): dp_T/dp = (1 - p)^(1/N - 1) / N
        let f = trotter_extrapolate_with_sigma(&[(4, 0.3, 0.01)]).unwrap();
        let expect = 0.7f64.powf(0.25 - 1.0) / 4.0 * 0.01;
        assert!((f.sigma_step - expect).abs() < 1e-14);
        assert!((f.predict_sigma(4) - 0.01).abs() < 1e-14);
    }
}
