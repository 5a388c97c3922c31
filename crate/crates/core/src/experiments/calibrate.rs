use serde::Serialize;

use super::config::{CalibrationCircuit, CalibrationMethod, PuritySource, RunConfig};
use super::{random_angles, Outcome, Provenance};
use crate::analysis::sample_expectation;
use crate::circuits::{brickwork_angle_count, Circuit, Spectrum};
use crate::circuits::{build_brickwork, build_tfim_trotter, domain_state, tfim_hamiltonian};
use crate::mitigation::{
    calibrate_known_observable, calibrate_purity, Calibration, KnownObservableSpec,
};
use crate::noise::run_noisy;
use crate::qstate::{DensityMatrix, PauliObservable, Statevector};
use crate::randmeas::{measure_purity, MeasurementPlan, Resampler};
use crate::rng::{derive_seed, stream_rng};
use crate::{Error, Result};

/// A calibration with the measurement it came from.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationRecord {
    #[serde(flatten)]
    pub calibration: Calibration,
    pub repeat: usize,
    /// Purity or observable value fed into the calibration.
    pub measured: f64,
    pub measured_sigma: f64,
    /// Ideal observable value (known-observable route only).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub known_value: Option<f64>,
}

const ANGLE_STREAM: u64 = 0;
const PURITY_STREAM: u64 = 1 << 32;
const SHOT_STREAM: u64 = 2 << 32;

/// Calibration circuit, initial state, epsilon of the short-time route and
/// default depth tag.
fn calibration_circuit(cfg: &RunConfig) -> Result<(Circuit, Statevector, f64, String)> {
    let c = cfg.calibrate.as_ref().expect("validated");
    match c.circuit {
        CalibrationCircuit::Tfim => {
            let p = cfg.tfim()?;
            let circ = build_tfim_trotter(&p, c.t, c.n_t)?;
            let width = Spectrum::of(&tfim_hamiltonian(&p)?)?.width();
            Ok((
                circ,
                domain_state(p.n, &c.flips)?,
                c.t * width,
                format!("nt={}", c.n_t),
            ))
        }
        CalibrationCircuit::Brickwork => {
            let n = c.n.expect("validated");
            let angles = random_angles(cfg.seed, ANGLE_STREAM, brickwork_angle_count(n, c.depth));
            let circ = build_brickwork(n, c.depth, &angles)?;
            Ok((
                circ,
                Statevector::zero(n)?,
                0.0,
                format!("brickwork depth={}", c.depth),
            ))
        }
        CalibrationCircuit::File => {
            let f = c.circuit_file.as_ref().expect("validated");
            let circ = Circuit::load(cfg.resolve(f))?;
            let n = circ.n();
            let tag = f
                .file_stem()
                .map(|s| s.to_string_lossy().into_owned())
                .unwrap_or_default();
            Ok((circ, Statevector::zero(n)?, 0.0, format!("file={tag}")))
        }
    }
}

/// Runs the configured calibration circuit through the noise model and
/// calibrates `p_tot` once per repeat.
pub fn calibrate(cfg: &RunConfig) -> Result<Vec<CalibrationRecord>> {
    let c = cfg.calibrate.as_ref().expect("validated");
    let noise = cfg.noise_model()?;
    let (circ, psi0, epsilon, tag) = calibration_circuit(cfg)?;
    let n = circ.n();
    let tag = c.depth_tag.clone().unwrap_or(tag);
    let rho = run_noisy(&circ, &noise, &DensityMatrix::from_pure(&psi0))?;
    let known = match c.method {
        CalibrationMethod::Known => {
            let obs = match &c.observable {
                Some(f) => PauliObservable::load(cfg.resolve(f))?,
                None => PauliObservable::z(n, n / 2),
            };
            let value = match c.known_value {
                Some(v) => v,
                None => circ.apply_to_statevector(&psi0)?.expectation(&obs)?,
            };
            Some(KnownObservableSpec::new(obs, value, epsilon)?)
        }
        CalibrationMethod::Purity => None,
    };
    (0..c.repeats)
        .map(|r| {
            let stream = r as u64;
            let (cal, measured, sigma) = match &known {
                None => {
                    let (t, s) = match c.purity_source {
                        PuritySource::Exact => (rho.purity(), 0.0),
                        PuritySource::Randomized => {
                            let seed = derive_seed(cfg.seed, PURITY_STREAM + stream);
                            let plan = MeasurementPlan::full(n, c.n_u, c.n_m, seed)?;
                            let est = measure_purity(&rho, &plan, Resampler::Jackknife)?;
                            (est.value, est.sigma)
                        }
                    };
                    (calibrate_purity(t, s, n, c.sigma_mode.into())?, t, s)
                }
                Some(spec) => {
                    let mut rng = stream_rng(cfg.seed, SHOT_STREAM + stream);
                    let (m, s) = sample_expectation(&rho, &spec.observable, c.shots, &mut rng)?;
                    (calibrate_known_observable(m, s, spec, n)?, m, s)
                }
            };
            Ok(CalibrationRecord {
                calibration: cal.tagged(tag.clone()).at(cfg.timestamp),
                repeat: r,
                measured,
                measured_sigma: sigma,
                known_value: known.as_ref().map(|k| k.known_value),
            })
        })
        .collect()
}

pub(super) fn cmd_calibrate(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome> {
    let records = calibrate(cfg)?;
    let path = cfg.out_dir().join("calibration.jsonl");
    prov.write_jsonl(&path, &records)?;
    let mut warnings = Vec::new();
    for r in &records {
        if r.calibration.clamped {
            warnings.push(format!(
                "repeat {}: estimate {:.4} clamped to {}",
                r.repeat, r.calibration.raw_p, r.calibration.p_tot
            ));
        }
    }
    let summary = records
        .iter()
        .map(|r| {
            format!(
                "{} repeat {}: p_tot = {:.5} +- {:.5}",
                r.calibration.depth_tag, r.repeat, r.calibration.p_tot, r.calibration.sigma_p
            )
        })
        .collect::<Vec<_>>()
        .join("\n");
    if records.is_empty() {
        return Err(Error::arg("no calibration repeats"));
    }
    Ok(Outcome {
        files: vec![path],
        warnings,
        summary,
    })
}
