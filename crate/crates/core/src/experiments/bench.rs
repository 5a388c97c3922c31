use std::fs::File;
use std::io::{BufWriter, Write};

use rayon::prelude::*;
use serde::Serialize;

use super::config::{PuritySource, RunConfig};
use super::{random_angles, Outcome, Provenance};
use crate::analysis::sample_expectation;
use crate::circuits::{brickwork_angle_count, build_brickwork};
use crate::mitigation::{
    calibrate_known_observable, calibrate_purity, mitigate_expectation, Calibration,
    KnownObservableSpec, Method, SigmaMode,
};
use crate::noise::{run_noisy, NoiseModel};
use crate::qstate::{DensityMatrix, PauliObservable, Statevector};
use crate::randmeas::{measure_purity, MeasurementPlan, Resampler};
use crate::rng::{derive_seed, stream_rng};
use crate::{Error, Result};

/// One random parameter point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchRow {
    pub operator: String,
    pub depth: usize,
    pub point: usize,
    pub exact: f64,
    pub raw: f64,
    pub raw_sigma: f64,
    pub trace: f64,
    pub trace_sigma: f64,
    /// `NaN` when the single-observable calibration was unusable.
    pub single: f64,
    pub single_sigma: f64,
}

/// Calibrations and error statistics of one operator at one depth.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchSummary {
    pub operator: String,
    pub n: usize,
    pub depth: usize,
    pub points: usize,
    pub p_trace: f64,
    pub p_trace_sigma: f64,
    pub p_single: f64,
    pub p_single_sigma: f64,
    /// Empty, or why the single-observable mitigation was omitted.
    pub single_flag: String,
    pub rms_raw: f64,
    pub rms_trace: f64,
    pub rms_single: f64,
}

#[derive(Clone, Copy)]
enum Role {
    Purity = 0,
    PurityShots = 1,
    Single = 2,
    SingleShots = 3,
    Data = 4,
    DataShots = 5,
}

fn stream(op: usize, depth: usize, role: Role, index: usize) -> u64 {
    ((op as u64) << 40) | ((depth as u64) << 32) | ((role as u64) << 24) | index as u64
}

struct Cell<'a> {
    cfg: &'a RunConfig,
    noise: &'a NoiseModel,
    obs: &'a PauliObservable,
    op: usize,
    depth_index: usize,
    depth: usize,
}

impl Cell<'_> {
    fn n(&self) -> usize {
        self.obs.n()
    }

    /// Ideal and noisy output of the brickwork circuit drawn from stream `s`.
    fn circuit(&self, role: Role, index: usize) -> Result<(Statevector, DensityMatrix)> {
        let n = self.n();
        let s = stream(self.op, self.depth_index, role, index);
        let angles = random_angles(self.cfg.seed, s, brickwork_angle_count(n, self.depth));
        let circ = build_brickwork(n, self.depth, &angles)?;
        let psi = circ.apply_to_statevector(&Statevector::zero(n)?)?;
        let rho = run_noisy(&circ, self.noise, &DensityMatrix::basis(n, 0)?)?;
        Ok((psi, rho))
    }

    fn shots_rng(&self, role: Role, index: usize) -> rand_chacha::ChaCha8Rng {
        stream_rng(
            self.cfg.seed,
            stream(self.op, self.depth_index, role, index),
        )
    }

    /// Mean of per-parameterization purity calibrations; the spread of the
    /// individual values sets the uncertainty.
    fn trace_calibration(&self) -> Result<Calibration> {
        let b = self.cfg.brickwork.as_ref().expect("validated");
        let n = self.n();
        let cals: Vec<Calibration> = (0..b.parameterizations)
            .into_par_iter()
            .map(|g| {
                let (_, rho) = self.circuit(Role::Purity, g)?;
                let (t, s) = match b.purity_source {
                    PuritySource::Exact => (rho.purity(), 0.0),
                    PuritySource::Randomized => {
                        let seed = derive_seed(
                            self.cfg.seed,
                            stream(self.op, self.depth_index, Role::PurityShots, g),
                        );
                        let plan = MeasurementPlan::full(n, b.n_u, b.n_m, seed)?;
                        let e = measure_purity(&rho, &plan, Resampler::Jackknife)?;
                        (e.value, e.sigma)
                    }
                };
                calibrate_purity(t, s, n, SigmaMode::Implicit)
            })
            .collect::<Result<_>>()?;
        let k = cals.len() as f64;
        let mean = cals.iter().map(|c| c.p_tot).sum::<f64>() / k;
        let var = cals.iter().map(|c| (c.p_tot - mean).powi(2)).sum::<f64>() / (k - 1.0);
        let mut cal = Calibration::new(mean, (var / k).sqrt(), Method::Purity, n)?
            .tagged(format!("brickwork depth={}", self.depth))
            .at(self.cfg.timestamp);
        cal.clamped = cals.iter().any(|c| c.clamped);
        cal.raw_p = cals.iter().map(|c| c.raw_p).sum::<f64>() / k;
        Ok(cal)
    }

    /// Fixed-parameter circuit compared with its noiseless value. Returns the
    /// calibration if usable and a flag otherwise.
    fn single_calibration(&self) -> Result<(Option<Calibration>, f64, f64, String)> {
        let b = self.cfg.brickwork.as_ref().expect("validated");
        let (psi, rho) = self.circuit(Role::Single, 0)?;
        let known = psi.expectation(self.obs)?;
        let Ok(spec) = KnownObservableSpec::new(self.obs.clone(), known, 0.0) else {
            return Ok((None, f64::NAN, f64::NAN, "not_identifiable".into()));
        };
        let mut rng = self.shots_rng(Role::SingleShots, 0);
        let (m, s) = sample_expectation(&rho, self.obs, b.calibration_shots, &mut rng)?;
        let cal = calibrate_known_observable(m, s, &spec, self.n())?
            .tagged(format!("brickwork depth={}", self.depth))
            .at(self.cfg.timestamp);
        let flag = if cal.raw_p < 0.0 {
            "unphysical_negative"
        } else if cal.p_tot >= 1.0 {
            "fully_depolarized"
        } else {
            ""
        };
        let (p, sp) = (cal.raw_p, cal.sigma_p);
        Ok((flag.is_empty().then_some(cal), p, sp, flag.into()))
    }
}

fn rms(rows: &[BenchRow], f: impl Fn(&BenchRow) -> f64) -> f64 {
    (rows.iter().map(|r| (f(r) - r.exact).powi(2)).sum::<f64>() / rows.len() as f64).sqrt()
}

/// Runs every operator at every depth.
pub fn brickwork_bench(cfg: &RunConfig) -> Result<(Vec<BenchRow>, Vec<BenchSummary>)> {
    let b = cfg.brickwork.as_ref().expect("validated");
    let noise = cfg.noise_model()?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (op, spec) in b.operators.iter().enumerate() {
        let obs = spec.build(&cfg.base_dir)?;
        if obs.n() < 2 {
            return Err(Error::arg(format!(
                "operator {:?} acts on fewer than 2 qubits",
                spec.name
            )));
        }
        for (depth_index, &depth) in b.depths.iter().enumerate() {
            let cell = Cell {
                cfg,
                noise: &noise,
                obs: &obs,
                op,
                depth_index,
                depth,
            };
            let trace = cell.trace_calibration()?;
            let (single, p_single, p_single_sigma, single_flag) = cell.single_calibration()?;
            let cell_rows: Vec<BenchRow> = (0..b.points)
                .into_par_iter()
                .map(|j| {
                    let (psi, rho) = cell.circuit(Role::Data, j)?;
                    let exact = psi.expectation(&obs)?;
                    let mut rng = cell.shots_rng(Role::DataShots, j);
                    let (m, s) = sample_expectation(&rho, &obs, b.shots, &mut rng)?;
                    let t = mitigate_expectation(m, s, &obs, &trace)?;
                    let (sv, ss) = match &single {
                        Some(c) => {
                            let v = mitigate_expectation(m, s, &obs, c)?;
                            (v.value, v.sigma)
                        }
                        None => (f64::NAN, f64::NAN),
                    };
                    Ok(BenchRow {
                        operator: spec.name.clone(),
                        depth,
                        point: j,
                        exact,
                        raw: m,
                        raw_sigma: s,
                        trace: t.value,
                        trace_sigma: t.sigma,
                        single: sv,
                        single_sigma: ss,
                    })
                })
                .collect::<Result<_>>()?;
            summaries.push(BenchSummary {
                operator: spec.name.clone(),
                n: obs.n(),
                depth,
                points: b.points,
                p_trace: trace.p_tot,
                p_trace_sigma: trace.sigma_p,
                p_single,
                p_single_sigma,
                single_flag,
                rms_raw: rms(&cell_rows, |r| r.raw),
                rms_trace: rms(&cell_rows, |r| r.trace),
                rms_single: rms(&cell_rows, |r| r.single),
            });
            rows.extend(cell_rows);
        }
    }
    Ok((rows, summaries))
}

fn write_table<T: Serialize>(path: &std::path::Path, prov: &Provenance, rows: &[T]) -> Result<()> {
    let mut f = BufWriter::new(File::create(path)?);
    for c in prov.comments() {
        writeln!(f, "# {c}")?;
    }
    let mut w = csv::Writer::from_writer(f);
    for r in rows {
        w.serialize(r).map_err(|e| Error::Format(e.to_string()))?;
    }
    w.flush()?;
    Ok(())
}

pub(super) fn cmd_brickwork_bench(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome> {
    let (rows, summaries) = brickwork_bench(cfg)?;
    let dir = cfg.out_dir();
    let table = dir.join("bench.csv");
    let summary_path = dir.join("bench_summary.csv");
    write_table(&table, prov, &rows)?;
    write_table(&summary_path, prov, &summaries)?;
    let mut warnings = Vec::new();
    let mut lines = Vec::new();
    for s in &summaries {
        if !s.single_flag.is_empty() {
            warnings.push(format!(
                "{} depth {}: single-observable calibration {}",
                s.operator, s.depth, s.single_flag
            ));
        }
        lines.push(format!(
            "{:>12} depth {:>2}: p_trace {:.3} rms raw {:.4} trace {:.4} single {:.4}{}",
            s.operator,
            s.depth,
            s.p_trace,
            s.rms_raw,
            s.rms_trace,
            s.rms_single,
            if s.single_flag.is_empty() {
                String::new()
            } else {
                format!(" [{}]", s.single_flag)
            }
        ));
    }
    Ok(Outcome {
        files: vec![table, summary_path],
        warnings,
        summary: lines.join("\n"),
    })
}
