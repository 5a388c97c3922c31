use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::config::RunConfig;
use super::{Outcome, Provenance};
use crate::analysis::uniform_times;
use crate::circuits::{build_tfim_trotter, domain_state, ed_evolve};
use crate::mitigation::{calibrate_purity, mitigate_renyi};
use crate::noise::run_noisy;
use crate::qstate::DensityMatrix;
use crate::randmeas::{
    estimate_purity_with, marginalize, sample_local_random_unitaries, simulate_shots,
    write_records_csv, MeasurementPlan,
};
use crate::rng::derive_seed;
use crate::{Error, Result};

/// One time point of the entanglement quench.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RenyiPoint {
    pub t: f64,
    pub steps: usize,
    /// Whole-register purity estimate and the calibration drawn from it.
    pub purity: f64,
    pub purity_sigma: f64,
    pub p_tot: f64,
    pub p_tot_sigma: f64,
    pub clamped: bool,
    /// Subsystem purity estimate.
    pub purity_a: f64,
    pub purity_a_sigma: f64,
    pub raw: f64,
    pub raw_sigma: f64,
    pub mitigated: f64,
    pub mitigated_sigma: f64,
    pub exact: f64,
}

/// Runs the Rényi-entropy quench. Returns the subsystem and one point per
/// time, and, if requested, the CSV text of every point's shot records.
pub fn renyi(cfg: &RunConfig) -> Result<(Vec<usize>, Vec<RenyiPoint>, Vec<String>)> {
    let r = cfg.renyi.as_ref().expect("validated");
    let p = cfg.tfim()?;
    let n = p.n;
    let noise = cfg.noise_model()?;
    let subsystem = r.subsystem.clone().unwrap_or_else(|| (0..n / 2).collect());
    if subsystem.is_empty() || subsystem.iter().any(|&q| q >= n) {
        return Err(Error::arg(format!(
            "subsystem {subsystem:?} invalid for {n} qubits"
        )));
    }
    let n_a = subsystem.len();
    let times = uniform_times(r.points, r.t_max);
    let psi0 = domain_state(n, &r.flips)?;
    let rho0 = DensityMatrix::from_pure(&psi0);
    let exact: Vec<f64> = ed_evolve(&p, &psi0, &times)?
        .iter()
        .map(|s| {
            Ok(DensityMatrix::from_pure(s)
                .partial_trace(&subsystem)?
                .renyi2())
        })
        .collect::<Result<_>>()?;
    let d_a = 0.5f64.powi(n_a as i32);
    let results: Vec<(RenyiPoint, String)> = times
        .par_iter()
        .enumerate()
        .map(|(i, &t)| {
            let steps = r.steps(t);
            let rho = run_noisy(&build_tfim_trotter(&p, t, steps)?, &noise, &rho0)?;
            let plan = MeasurementPlan::full(n, r.n_u, r.n_m, derive_seed(cfg.seed, i as u64))?;
            let unitaries = sample_local_random_unitaries(&plan)?;
            let records = simulate_shots(&rho, &unitaries, &plan)?;
            let resampler = r.resampler(derive_seed(plan.seed, 0));
            let full = estimate_purity_with(&records, &plan, resampler)?;
            let cal = calibrate_purity(full.value, full.sigma, n, r.sigma_mode.into())?
                .tagged(format!("nt={steps}"))
                .at(cfg.timestamp);
            let (sub, sub_plan) = marginalize(&records, &plan, &subsystem)?;
            let part = estimate_purity_with(&sub, &sub_plan, resampler)?;
            let raw_purity = part.value.clamp(d_a, 1.0);
            let mitigated = mitigate_renyi(part.value, part.sigma, n_a, &cal)?;
            let mut text = Vec::new();
            if r.write_records {
                write_records_csv(&mut text, &records, &plan)?;
            }
            Ok((
                RenyiPoint {
                    t,
                    steps,
                    purity: full.value,
                    purity_sigma: full.sigma,
                    p_tot: cal.p_tot,
                    p_tot_sigma: cal.sigma_p,
                    clamped: cal.clamped || mitigated.clamped,
                    purity_a: part.value,
                    purity_a_sigma: part.sigma,
                    raw: -raw_purity.log2(),
                    raw_sigma: part.sigma / (raw_purity * std::f64::consts::LN_2),
                    mitigated: mitigated.value,
                    mitigated_sigma: mitigated.sigma,
                    exact: exact[i],
                },
                String::from_utf8(text).expect("CSV output is UTF-8"),
            ))
        })
        .collect::<Result<_>>()?;
    let (points, records) = results.into_iter().unzip();
    Ok((subsystem, points, records))
}

pub(super) fn cmd_renyi(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome> {
    let (subsystem, points, records) = renyi(cfg)?;
    let dir = cfg.out_dir();
    let path = dir.join("renyi.csv");
    let mut f = BufWriter::new(File::create(&path)?);
    for c in prov.comments() {
        writeln!(f, "# {c}")?;
    }
    let sub: Vec<String> = subsystem.iter().map(|q| q.to_string()).collect();
    writeln!(f, "# subsystem={}", sub.join(";"))?;
    let mut w = csv::Writer::from_writer(f);
    for p in &points {
        w.serialize(p).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    let mut files = vec![path];
    if cfg.renyi.as_ref().expect("validated").write_records {
        for (i, text) in records.iter().enumerate() {
            let path = dir.join(format!("renyi_records_{i:03}.csv"));
            let mut f = BufWriter::new(File::create(&path)?);
            for c in prov.comments() {
                writeln!(f, "# {c}")?;
            }
            f.write_all(text.as_bytes())?;
            f.flush()?;
            files.push(path);
        }
    }
    let warnings = points
        .iter()
        .filter(|p| p.clamped)
        .map(|p| format!("t={:.3}: calibration or mitigated purity clamped", p.t))
        .collect();
    let l2 = |f: fn(&RenyiPoint) -> f64| {
        points
            .iter()
            .map(|p| (f(p) - p.exact).powi(2))
            .sum::<f64>()
            .sqrt()
    };
    let summary = format!(
        "L2 distance to ED entropy: raw {:.4}, mitigated {:.4}",
        l2(|p| p.raw),
        l2(|p| p.mitigated)
    );
    Ok(Outcome {
        files,
        warnings,
        summary,
    })
}
