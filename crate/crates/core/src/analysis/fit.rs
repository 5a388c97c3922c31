//! Single damped cosine `A e^{-d t} cos(omega t) + c1 t + c2`.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const MAX_ITERATIONS: usize = 500;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CosineParams {
    pub a: f64,
    pub d: f64,
    pub omega: f64,
    pub c1: f64,
    pub c2: f64,
}

impl CosineParams {
    pub fn eval(&self, t: f64) -> f64 {
        self.a * (-self.d * t).exp() * (self.omega * t).cos() + self.c1 * t + self.c2
    }

    fn to_vec(self) -> [f64; 5] {
        [self.a, self.d, self.omega, self.c1, self.c2]
    }

    fn from_slice(v: &[f64]) -> Self {
        Self {
            a: v[0],
            d: v[1],
            omega: v[2],
            c1: v[3],
            c2: v[4],
        }
    }
}

/// Starting point derived from the data.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencySeed {
    pub omega: f64,
    pub amplitude: f64,
    pub offset: f64,
    /// No oscillating component was found.
    pub dc_only: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CosineFit {
    pub params: CosineParams,
    /// Row-major 5x5 covariance in the order `A, d, omega, c1, c2`.
    pub covariance: Vec<f64>,
    pub residual_norm: f64,
    pub iterations: usize,
    pub converged: bool,
    /// `false` when the data cannot determine a frequency.
    pub identifiable: bool,
}

impl CosineFit {
    pub fn sigma(&self, k: usize) -> f64 {
        self.covariance[k * 5 + k].max(0.0).sqrt()
    }

    pub fn omega_sigma(&self) -> f64 {
        self.sigma(2)
    }
}

fn check_inputs(times: &[f64], values: &[f64], weights: Option<&[f64]>, min: usize) -> Result<()> {
    if times.len() != values.len() || weights.is_some_and(|w| w.len() != times.len()) {
        return Err(Error::arg(
            "times, values and weights must have equal lengths",
        ));
    }
    if times.len() < min {
        return Err(Error::arg(format!(
            "need at least {min} points, got {}",
            times.len()
        )));
    }
    if times.iter().chain(values).any(|x| !x.is_finite()) {
        return Err(Error::arg("non-finite input"));
    }
    if weights.is_some_and(|w| w.iter().any(|x| !(x.is_finite() && *x >= 0.0))) {
        return Err(Error::arg("weights must be finite and non-negative"));
    }
    Ok(())
}

/// Least-squares line `a + b t`.
fn detrend(times: &[f64], values: &[f64]) -> Vec<f64> {
    let m = times.len() as f64;
    let mt = times.iter().sum::<f64>() / m;
    let my = values.iter().sum::<f64>() / m;
    let stt: f64 = times.iter().map(|t| (t - mt).powi(2)).sum();
    let b = if stt > 0.0 {
        times
            .iter()
            .zip(values)
            .map(|(t, y)| (t - mt) * (y - my))
            .sum::<f64>()
            / stt
    } else {
        0.0
    };
    times
        .iter()
        .zip(values)
        .map(|(t, y)| y - my - b * (t - mt))
        .collect()
}

/// Periodogram peak of the linearly detrended series. Frequencies are
/// scanned from half a cycle per window up to the Nyquist limit of the mean
/// spacing.
pub fn frequency_seed(times: &[f64], values: &[f64]) -> Result<FrequencySeed> {
    check_inputs(times, values, None, 8)?;
    let m = times.len();
    let span = times[m - 1] - times[0];
    if !(span > 0.0) {
        return Err(Error::arg("times must span a positive window"));
    }
    let mean = values.iter().sum::<f64>() / m as f64;
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), &v| {
            (a.min(v), b.max(v))
        });
    let amplitude = 0.5 * (hi - lo);
    let resid = detrend(times, values);
    let scale = values.iter().map(|v| v.abs()).fold(1e-300, f64::max);
    let rms = (resid.iter().map(|r| r * r).sum::<f64>() / m as f64).sqrt();
    if rms <= 1e-10 * scale.max(1.0) {
        return Ok(FrequencySeed {
            omega: 0.0,
            amplitude,
            offset: mean,
            dc_only: true,
        });
    }
    let w_lo = std::f64::consts::PI / span;
    let w_hi = std::f64::consts::PI * (m - 1) as f64 / span;
    let grid = 4000;
    let power = |w: f64| {
        let (c, s) = times.iter().zip(&resid).fold((0.0, 0.0), |(c, s), (t, r)| {
            (c + r * (w * t).cos(), s + r * (w * t).sin())
        });
        c * c + s * s
    };
    let (mut best_w, mut best_p) = (w_lo, f64::NEG_INFINITY);
    for k in 0..=grid {
        let w = w_lo + (w_hi - w_lo) * k as f64 / grid as f64;
        let p = power(w);
        if p > best_p {
            best_w = w;
            best_p = p;
        }
    }
    Ok(FrequencySeed {
        omega: best_w,
        amplitude,
        offset: mean,
        dc_only: false,
    })
}

/// Residual norm and amplitudes of `a cos(w t) + c1 t + c2` at fixed `w`.
fn projected(times: &[f64], values: &[f64], wts: &[f64], w: f64) -> (f64, Vector3<f64>) {
    let mut ata = Matrix3::zeros();
    let mut aty = Vector3::zeros();
    for ((&t, &y), &q) in times.iter().zip(values).zip(wts) {
        let row = Vector3::new((w * t).cos(), t, 1.0);
        ata += q * row * row.transpose();
        aty += q * y * row;
    }
    let coef = ata
        .try_inverse()
        .map(|inv| inv * aty)
        .unwrap_or_else(Vector3::zeros);
    let rss = times
        .iter()
        .zip(values)
        .zip(wts)
        .map(|((&t, &y), &q)| q * (y - coef[0] * (w * t).cos() - coef[1] * t - coef[2]).powi(2))
        .sum::<f64>();
    (rss, coef)
}

fn rss(times: &[f64], values: &[f64], wts: &[f64], p: &[f64]) -> f64 {
    let m = CosineParams::from_slice(p);
    times
        .iter()
        .zip(values)
        .zip(wts)
        .map(|((&t, &y), &q)| q * (y - m.eval(t)).powi(2))
        .sum()
}

struct Lm {
    params: Vec<f64>,
    rss: f64,
    jtj: DMatrix<f64>,
    iterations: usize,
    converged: bool,
}

/// Levenberg-Marquardt over the parameters flagged in `free`, with a
/// central-difference Jacobian.
fn levenberg_marquardt(
    times: &[f64],
    values: &[f64],
    wts: &[f64],
    start: [f64; 5],
    free: &[bool; 5],
) -> Lm {
    let idx: Vec<usize> = (0..5).filter(|&k| free[k]).collect();
    let k = idx.len();
    let m = times.len();
    let mut p = start.to_vec();
    let mut cost = rss(times, values, wts, &p);
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut jtj = DMatrix::zeros(k, k);
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let model = CosineParams::from_slice(&p);
        let r = DVector::from_iterator(
            m,
            times.iter().zip(values).map(|(&t, &y)| y - model.eval(t)),
        );
        let mut jac = DMatrix::zeros(m, k);
        for (c, &j) in idx.iter().enumerate() {
            let h = 1e-7 * p[j].abs().max(1e-3);
            let (mut up, mut dn) = (p.clone(), p.clone());
            up[j] += h;
            dn[j] -= h;
            let (mu, md) = (CosineParams::from_slice(&up), CosineParams::from_slice(&dn));
            for (row, &t) in times.iter().enumerate() {
                jac[(row, c)] = (mu.eval(t) - md.eval(t)) / (2.0 * h);
            }
        }
        let w = DMatrix::from_diagonal(&DVector::from_column_slice(wts));
        jtj = jac.transpose() * &w * &jac;
        let jtr = jac.transpose() * &w * &r;
        let mut accepted = false;
        for _ in 0..30 {
            let mut a = jtj.clone();
            for d in 0..k {
                a[(d, d)] += lambda * jtj[(d, d)].max(1e-12);
            }
            let Some(step) = a.lu().solve(&jtr) else {
                lambda *= 10.0;
                continue;
            };
            let mut trial = p.clone();
            for (c, &j) in idx.iter().enumerate() {
                trial[j] += step[c];
            }
            let new_cost = rss(times, values, wts, &trial);
            if new_cost.is_finite() && new_cost <= cost {
                let small_step = idx
                    .iter()
                    .enumerate()
                    .all(|(c, &j)| step[c].abs() <= 1e-10 * (p[j].abs() + 1e-10));
                let small_gain = cost - new_cost <= 1e-14 * cost.max(1e-300);
                p = trial;
                cost = new_cost;
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if small_step || small_gain {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            // no descent direction left: at a minimum to working precision
            converged = true;
        }
        if converged || cost == 0.0 {
            converged = true;
            break;
        }
    }
    Lm {
        params: p,
        rss: cost,
        jtj,
        iterations,
        converged,
    }
}

/// Nonlinear least-squares fit of the damped cosine.
///
/// The pure cosine (`d = c1 = 0`) is fitted first from a small bracket of
/// frequencies around the seed; the full model starts from the best of those
/// and is never allowed to end with a larger residual than it. `sigmas`, if
/// given, weight residuals by `1/sigma^2`.
pub fn fit_damped_cosine(
    times: &[f64],
    values: &[f64],
    sigmas: Option<&[f64]>,
    seed: &FrequencySeed,
) -> Result<CosineFit> {
    check_inputs(times, values, sigmas, 6)?;
    let m = times.len();
    let wts: Vec<f64> = match sigmas {
        Some(s) => {
            let floor = s
                .iter()
                .copied()
                .filter(|x| *x > 0.0)
                .fold(f64::INFINITY, f64::min);
            let floor = if floor.is_finite() { floor } else { 1.0 };
            s.iter().map(|x| 1.0 / x.max(floor).powi(2)).collect()
        }
        None => vec![1.0; m],
    };
    if seed.dc_only {
        let offset = values.iter().sum::<f64>() / m as f64;
        let params = CosineParams {
            a: 0.0,
            d: 0.0,
            omega: 0.0,
            c1: 0.0,
            c2: offset,
        };
        let residual_norm = rss(times, values, &vec![1.0; m], &params.to_vec()).sqrt();
        return Ok(CosineFit {
            params,
            covariance: vec![f64::NAN; 25],
            residual_norm,
            iterations: 0,
            converged: false,
            identifiable: false,
        });
    }
    // bracket scan of the projected residual around the seed
    let mut starts: Vec<(f64, f64)> = (0..=80)
        .map(|k| seed.omega * (0.5 + k as f64 / 80.0))
        .map(|w| (projected(times, values, &wts, w).0, w))
        .collect();
    starts.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut best_sub: Option<Lm> = None;
    for &(_, w) in starts.iter().take(3) {
        let (_, coef) = projected(times, values, &wts, w);
        let sub = levenberg_marquardt(
            times,
            values,
            &wts,
            [coef[0], 0.0, w, 0.0, coef[2]],
            &[true, false, true, false, true],
        );
        if best_sub.as_ref().is_none_or(|b| sub.rss < b.rss) {
            best_sub = Some(sub);
        }
    }
    let sub = best_sub.expect("at least one start");
    let mut start = [0.0; 5];
    start.copy_from_slice(&sub.params);
    let full = levenberg_marquardt(times, values, &wts, start, &[true; 5]);
    let (mut params, cost, iterations, converged, jtj) = if full.rss <= sub.rss {
        (
            full.params,
            full.rss,
            full.iterations + sub.iterations,
            full.converged,
            full.jtj,
        )
    } else {
        // re-evaluate curvature of the full model at the submodel optimum
        let at = levenberg_marquardt(times, values, &wts, start, &[false; 5]);
        (sub.params, sub.rss, sub.iterations, sub.converged, at.jtj)
    };
    // cos is even, so the sign of omega carries no information
    params[2] = params[2].abs();
    let dof = m.saturating_sub(5).max(1) as f64;
    let s2 = if sigmas.is_some() { 1.0 } else { cost / dof };
    let (covariance, identifiable) = match jtj.clone().try_inverse() {
        Some(inv) if jtj.nrows() == 5 && inv.iter().all(|x| x.is_finite()) => (
            (0..25)
                .map(|k| s2 * inv[(k / 5, k % 5)])
                .collect::<Vec<f64>>(),
            params[0].abs() > 1e-9,
        ),
        _ => (vec![f64::NAN; 25], false),
    };
    let residual_norm = rss(times, values, &vec![1.0; m], &params).sqrt();
    Ok(CosineFit {
        params: CosineParams::from_slice(&params),
        covariance,
        residual_norm,
        iterations,
        converged,
        identifiable,
    })
}

/// Seeds from the periodogram and fits.
pub fn fit_with_seed(times: &[f64], values: &[f64], sigmas: Option<&[f64]>) -> Result<CosineFit> {
    let seed = frequency_seed(times, values)?;
    fit_damped_cosine(times, values, sigmas, &seed)
}
