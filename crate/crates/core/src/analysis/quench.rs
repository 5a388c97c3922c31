//! Noisy Trotterized quench of a local magnetization with short-time
//! self-calibration.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::sampling::sample_expectation;
use super::TimeSeries;
use crate::circuits::{build_tfim_trotter, domain_state, tfim_hamiltonian, Spectrum, TfimParams};
use crate::mitigation::{
    calibrate_known_observable, mitigate_expectation, trotter_extrapolate_with_sigma, Calibration,
    KnownObservableSpec, TrotterFit,
};
use crate::noise::{run_noisy, NoiseModel};
use crate::qstate::{DensityMatrix, PauliObservable};
use crate::rng::stream_rng;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchSpec {
    pub params: TfimParams,
    /// Spins flipped from all-up in the initial basis state.
    #[serde(default)]
    pub flips: Vec<usize>,
    /// Site of the measured `Z`; defaults to the central site.
    #[serde(default)]
    pub site: Option<usize>,
    pub times: Vec<f64>,
    /// Trotter step counts; each yields one series.
    pub n_t: Vec<usize>,
    /// If set, a time point uses at least `ceil(t / max_dt)` steps.
    #[serde(default)]
    pub max_dt: Option<f64>,
    /// Shots per expectation value; `0` gives exact values.
    pub shots: u64,
    pub seed: u64,
    /// Calibration circuits run for `t = epsilon / (E_max - E_min)`.
    pub epsilon: f64,
    /// Fit a per-step error over all calibrated step counts.
    #[serde(default)]
    pub extrapolate: bool,
}

/// `n` points on `[0, t_max]` excluding nothing; `t = 0` is included.
pub fn uniform_times(points: usize, t_max: f64) -> Vec<f64> {
    (0..points)
        .map(|i| t_max * i as f64 / (points.max(2) - 1) as f64)
        .collect()
}

impl QuenchSpec {
    pub fn new(
        params: TfimParams,
        flips: Vec<usize>,
        times: Vec<f64>,
        n_t: Vec<usize>,
        shots: u64,
        seed: u64,
    ) -> Self {
        Self {
            params,
            flips,
            site: None,
            times,
            n_t,
            max_dt: None,
            shots,
            seed,
            epsilon: 0.01,
            extrapolate: false,
        }
    }

    pub fn site(&self) -> usize {
        self.site.unwrap_or(self.params.n / 2)
    }

    pub fn validate(&self) -> Result<()> {
        self.params.validate()?;
        if self.site() >= self.params.n {
            return Err(Error::QubitOutOfRange {
                index: self.site(),
                n: self.params.n,
            });
        }
        if self.n_t.is_empty() || self.n_t.contains(&0) {
            return Err(Error::arg("need at least one positive Trotter step count"));
        }
        if self.times.is_empty()
            || self.times.iter().any(|t| !(t.is_finite() && *t >= 0.0))
            || self.times.windows(2).any(|w| !(w[1] > w[0]))
        {
            return Err(Error::arg(
                "times must be non-negative and strictly increasing",
            ));
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(Error::arg("epsilon must lie in (0, 1)"));
        }
        if self.max_dt.is_some_and(|d| !(d > 0.0)) {
            return Err(Error::arg("max_dt must be positive"));
        }
        Ok(())
    }

    /// Distinct circuit step counts over all series and times, ascending.
    pub fn step_counts(&self) -> Vec<usize> {
        let mut depths: Vec<usize> = self
            .n_t
            .iter()
            .flat_map(|&b| self.times.iter().map(move |&t| self.steps(b, t)))
            .collect();
        depths.sort_unstable();
        depths.dedup();
        depths
    }

    fn steps(&self, base: usize, t: f64) -> usize {
        match self.max_dt {
            Some(dt) => base.max((t / dt - 1e-12).ceil() as usize),
            None => base,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchRun {
    pub n_t: usize,
    pub series: TimeSeries,
    /// Calibration used at every time point, keyed by step count.
    pub calibrations: BTreeMap<usize, Calibration>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuenchResult {
    pub runs: Vec<QuenchRun>,
    /// Direct short-time calibrations, one per step count used.
    pub direct: BTreeMap<usize, Calibration>,
    pub trotter: Option<TrotterFit>,
    /// Inverse-variance mean over runs.
    pub combined: TimeSeries,
    pub any_clamped: bool,
}

fn measure(
    params: &TfimParams,
    rho0: &DensityMatrix,
    noise: &NoiseModel,
    obs: &PauliObservable,
    t: f64,
    steps: usize,
    shots: u64,
    seed: u64,
    stream: u64,
) -> Result<(f64, f64)> {
    let circ = build_tfim_trotter(params, t, steps)?;
    let rho = run_noisy(&circ, noise, rho0)?;
    let mut rng = stream_rng(seed, stream);
    sample_expectation(&rho, obs, shots, &mut rng)
}

/// Runs the quench for every step count, calibrates each circuit depth from
/// its short-time twin, and mitigates the magnetization.
pub fn run_quench(spec: &QuenchSpec, noise: &NoiseModel) -> Result<QuenchResult> {
    run_quench_with(spec, noise, None)
}

/// As [`run_quench`], but with `supplied` calibrations (keyed by step count)
/// replacing the short-time circuits. Every step count used must be present.
pub fn run_quench_with(
    spec: &QuenchSpec,
    noise: &NoiseModel,
    supplied: Option<&BTreeMap<usize, Calibration>>,
) -> Result<QuenchResult> {
    spec.validate()?;
    let p = &spec.params;
    let n = p.n;
    let psi0 = domain_state(n, &spec.flips)?;
    let rho0 = DensityMatrix::from_pure(&psi0);
    let obs = PauliObservable::z(n, spec.site());
    let spectrum = Spectrum::of(&tfim_hamiltonian(p)?)?;
    let exact: Vec<f64> = spectrum
        .evolve_many(&psi0, &spec.times)?
        .iter()
        .map(|s| s.expectation(&obs))
        .collect::<Result<_>>()?;
    let known = psi0.expectation(&obs)?;
    let kspec = KnownObservableSpec::new(obs.clone(), known, spec.epsilon)?;
    let t_cal = spec.epsilon / spectrum.width();

    let depths = spec.step_counts();

    // calibration streams start after the data streams
    let data_streams = (spec.n_t.len() * spec.times.len()) as u64;
    let direct: Vec<(usize, Calibration)> = match supplied {
        Some(cals) => depths
            .iter()
            .map(|&steps| {
                let c = cals.get(&steps).ok_or_else(|| {
                    Error::arg(format!("no calibration supplied for {steps} Trotter steps"))
                })?;
                if c.n != n {
                    return Err(Error::Dimension {
                        expected: n,
                        got: c.n,
                    });
                }
                Ok((steps, c.clone()))
            })
            .collect::<Result<_>>()?,
        None => depths
            .par_iter()
            .enumerate()
            .map(|(k, &steps)| {
                let (m, s) = measure(
                    p,
                    &rho0,
                    noise,
                    &obs,
                    t_cal,
                    steps,
                    spec.shots,
                    spec.seed,
                    data_streams + k as u64,
                )?;
                let c = calibrate_known_observable(m, s, &kspec, n)?.tagged(format!("nt={steps}"));
                Ok((steps, c))
            })
            .collect::<Result<_>>()?,
    };
    let direct: BTreeMap<usize, Calibration> = direct.into_iter().collect();
    let any_clamped = direct.values().any(|c| c.clamped);

    let trotter = if spec.extrapolate {
        let pts: Vec<(usize, f64, f64)> = direct
            .iter()
            .map(|(&k, c)| (k, c.p_tot, c.sigma_p))
            .collect();
        Some(trotter_extrapolate_with_sigma(&pts)?)
    } else {
        None
    };
    let cal_for = |steps: usize| -> Result<Calibration> {
        let c = &direct[&steps];
        match &trotter {
            Some(f) => f.calibration(steps, c),
            None => Ok(c.clone()),
        }
    };

    let mut runs = Vec::with_capacity(spec.n_t.len());
    for (r, &base) in spec.n_t.iter().enumerate() {
        let points: Vec<(f64, f64, f64, f64, usize)> = spec
            .times
            .par_iter()
            .enumerate()
            .map(|(i, &t)| {
                let steps = spec.steps(base, t);
                let stream = (r * spec.times.len() + i) as u64;
                let (m, s) = measure(
                    p, &rho0, noise, &obs, t, steps, spec.shots, spec.seed, stream,
                )?;
                let mv = mitigate_expectation(m, s, &obs, &cal_for(steps)?)?;
                Ok((m, s, mv.value, mv.sigma, steps))
            })
            .collect::<Result<_>>()?;
        let mut calibrations = BTreeMap::new();
        for pt in &points {
            calibrations.insert(pt.4, cal_for(pt.4)?);
        }
        runs.push(QuenchRun {
            n_t: base,
            series: TimeSeries {
                times: spec.times.clone(),
                raw: points.iter().map(|x| x.0).collect(),
                raw_sigma: points.iter().map(|x| x.1).collect(),
                mitigated: points.iter().map(|x| x.2).collect(),
                mitigated_sigma: points.iter().map(|x| x.3).collect(),
                exact: Some(exact.clone()),
            },
            calibrations,
        });
    }
    let combined = combine(&runs, &exact);
    Ok(QuenchResult {
        runs,
        direct,
        trotter,
        combined,
        any_clamped,
    })
}

fn weighted(values: impl Iterator<Item = (f64, f64)>) -> (f64, f64) {
    let vals: Vec<(f64, f64)> = values.collect();
    if vals.iter().any(|v| v.1 <= 0.0) {
        let m = vals.iter().map(|v| v.0).sum::<f64>() / vals.len() as f64;
        return (m, 0.0);
    }
    let w: f64 = vals.iter().map(|v| 1.0 / (v.1 * v.1)).sum();
    (
        vals.iter().map(|v| v.0 / (v.1 * v.1)).sum::<f64>() / w,
        w.sqrt().recip(),
    )
}

fn combine(runs: &[QuenchRun], exact: &[f64]) -> TimeSeries {
    let m = exact.len();
    let mut ts = TimeSeries {
        times: runs[0].series.times.clone(),
        raw: Vec::with_capacity(m),
        raw_sigma: Vec::with_capacity(m),
        mitigated: Vec::with_capacity(m),
        mitigated_sigma: Vec::with_capacity(m),
        exact: Some(exact.to_vec()),
    };
    for i in 0..m {
        let (r, rs) = weighted(
            runs.iter()
                .map(|x| (x.series.raw[i], x.series.raw_sigma[i])),
        );
        let (v, vs) = weighted(
            runs.iter()
                .map(|x| (x.series.mitigated[i], x.series.mitigated_sigma[i])),
        );
        ts.raw.push(r);
        ts.raw_sigma.push(rs);
        ts.mitigated.push(v);
        ts.mitigated_sigma.push(vs);
    }
    ts
}
