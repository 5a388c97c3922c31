use serde::{Deserialize, Serialize};

use super::uncertainty::{delta_ptot, SigmaMode};
use crate::qstate::PauliObservable;
use crate::{tolerances, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Purity,
    KnownObservable,
}

/// A calibrated whole-register error probability.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Calibration {
    pub p_tot: f64,
    pub sigma_p: f64,
    pub method: Method,
    pub n: usize,
    /// Identifies the circuit structure and depth the value applies to.
    pub depth_tag: String,
    /// Caller-supplied time of calibration (seconds); never read from the
    /// clock so that records stay reproducible.
    pub timestamp: u64,
    /// The input or the raw estimate fell outside the physical range.
    pub clamped: bool,
    /// Estimate before clamping.
    pub raw_p: f64,
}

impl Calibration {
    pub fn new(p_tot: f64, sigma_p: f64, method: Method, n: usize) -> Result<Self> {
        let c = Self {
            p_tot,
            sigma_p,
            method,
            n,
            depth_tag: String::new(),
            timestamp: 0,
            clamped: false,
            raw_p: p_tot,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn tagged(mut self, depth_tag: impl Into<String>) -> Self {
        self.depth_tag = depth_tag.into();
        self
    }

    pub fn at(mut self, timestamp: u64) -> Self {
        self.timestamp = timestamp;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.p_tot) {
            return Err(Error::Probability(self.p_tot));
        }
        if !(self.sigma_p >= 0.0) || !self.sigma_p.is_finite() {
            return Err(Error::arg(format!(
                "sigma_p must be finite and non-negative, got {}",
                self.sigma_p
            )));
        }
        if self.n == 0 {
            return Err(Error::arg("calibration for zero qubits"));
        }
        Ok(())
    }

    /// `p_tot` sits on a boundary where inversion loses all information.
    pub fn is_fully_depolarized(&self) -> bool {
        self.p_tot >= 1.0
    }
}

/// Purity of `(1 - p) |psi><psi| + p I/2^n`.
pub fn purity_of_ptot(p: f64, n: usize) -> f64 {
    let d = 0.5f64.powi(n as i32);
    (1.0 - p).powi(2) + 2.0 * d * p * (1.0 - p) + d * p * p
}

/// Root of `purity_of_ptot(p, n) = t` on `[0, 1]` by bisection. `t` outside
/// `[2^-n, 1]` is clamped and flagged.
pub fn solve_ptot_from_purity(t: f64, n: usize) -> Result<Calibration> {
    if !t.is_finite() {
        return Err(Error::arg(format!("purity must be finite, got {t}")));
    }
    if n == 0 {
        return Err(Error::arg("calibration for zero qubits"));
    }
    let d = 0.5f64.powi(n as i32);
    let clamped = !(d..=1.0).contains(&t);
    let target = t.clamp(d, 1.0);
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    // purity is strictly decreasing in p on [0, 1]
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if purity_of_ptot(mid, n) > target {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-15 {
            break;
        }
    }
    let p = if target >= 1.0 {
        0.0
    } else if target <= d {
        1.0
    } else {
        0.5 * (lo + hi)
    };
    let mut c = Calibration::new(p, 0.0, Method::Purity, n)?;
    c.clamped = clamped;
    // unclamped estimate of the quadratic, for diagnostics
    c.raw_p = if clamped {
        1.0 - ((t - d) / (1.0 - d)).max(0.0).sqrt()
    } else {
        p
    };
    Ok(c)
}

/// Purity calibration with uncertainty `sigma_t` on the measured purity.
pub fn calibrate_purity(t: f64, sigma_t: f64, n: usize, mode: SigmaMode) -> Result<Calibration> {
    let mut c = solve_ptot_from_purity(t, n)?;
    c.sigma_p = if c.p_tot < 1.0 {
        delta_ptot(c.p_tot, sigma_t, n, t.clamp(0.0, 1.0), mode)?
    } else {
        0.0
    };
    c.validate()?;
    Ok(c)
}

/// Mean purity over circuit parameterizations, split into groups whose
/// spread sets the uncertainty.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GroupedPurity {
    pub mean: f64,
    pub sigma: f64,
    pub groups: usize,
}

/// Splits `values` into `groups` consecutive groups of equal size (the
/// remainder is dropped), averages each, and reports the mean of the group
/// means with its standard error.
pub fn average_purity_groups(values: &[f64], groups: usize) -> Result<GroupedPurity> {
    if groups < 2 || values.len() < groups {
        return Err(Error::arg(format!(
            "need at least 2 groups and one value per group, got {groups} groups for {} values",
            values.len()
        )));
    }
    let size = values.len() / groups;
    let means: Vec<f64> = values
        .chunks_exact(size)
        .take(groups)
        .map(|c| c.iter().sum::<f64>() / size as f64)
        .collect();
    let mean = means.iter().sum::<f64>() / groups as f64;
    let var = means.iter().map(|m| (m - mean).powi(2)).sum::<f64>() / (groups - 1) as f64;
    Ok(GroupedPurity {
        mean,
        sigma: (var / groups as f64).sqrt(),
        groups,
    })
}

/// Observable with a known ideal value, e.g. at `t = 0` or on an
/// identity-equivalent circuit.
#[derive(Debug, Clone, PartialEq)]
pub struct KnownObservableSpec {
    pub observable: PauliObservable,
    pub known_value: f64,
    /// `t * E_width` of the short-time circuit; `0` for an exact identity.
    pub epsilon: f64,
}

impl KnownObservableSpec {
    pub fn new(observable: PauliObservable, known_value: f64, epsilon: f64) -> Result<Self> {
        let s = Self {
            observable,
            known_value,
            epsilon,
        };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        if (self.known_value - self.observable.mixed_value()).abs() <= tolerances::INVERTIBILITY {
            return Err(Error::arg(
                "known value equals the maximally mixed value; p_tot is not identifiable",
            ));
        }
        if !(self.epsilon >= 0.0) {
            return Err(Error::arg(format!(
                "epsilon must be non-negative, got {}",
                self.epsilon
            )));
        }
        Ok(())
    }
}

/// `p = (known - measured) / (known - Tr[O]/2^n)`, clamped to `[0, 1]` with a
/// flag. `sigma_meas` propagates linearly.
pub fn calibrate_known_observable(
    measured: f64,
    sigma_meas: f64,
    spec: &KnownObservableSpec,
    n: usize,
) -> Result<Calibration> {
    spec.validate()?;
    if spec.observable.n() != n {
        return Err(Error::Dimension {
            expected: n,
            got: spec.observable.n(),
        });
    }
    if !measured.is_finite() || !(sigma_meas >= 0.0) {
        return Err(Error::arg(
            "measured value and its sigma must be finite, sigma non-negative",
        ));
    }
    let gap = spec.known_value - spec.observable.mixed_value();
    let raw = (spec.known_value - measured) / gap;
    let p = raw.clamp(0.0, 1.0);
    let mut c = Calibration::new(p, sigma_meas / gap.abs(), Method::KnownObservable, n)?;
    c.clamped = p != raw;
    c.raw_p = raw;
    Ok(c)
}
