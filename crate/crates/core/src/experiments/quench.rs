use std::collections::BTreeMap;
use std::fs::File;
use std::io::{BufWriter, Write};

use serde::Serialize;

use super::config::RunConfig;
use super::{Outcome, Provenance};
use crate::analysis::{mass_report, run_quench_with, uniform_times, QuenchResult, QuenchSpec};
use crate::mitigation::{latest_calibration, Calibration, TrotterFit};
use crate::{Error, Result};

pub fn quench_spec(cfg: &RunConfig) -> Result<QuenchSpec> {
    let q = cfg.quench.as_ref().expect("validated");
    let mut spec = QuenchSpec::new(
        cfg.tfim()?,
        q.flips.clone(),
        uniform_times(q.points, q.t_max),
        q.n_t.clone(),
        q.shots,
        cfg.seed,
    );
    spec.site = q.site;
    spec.max_dt = q.max_dt;
    spec.epsilon = q.epsilon;
    spec.extrapolate = q.extrapolate;
    spec.validate()?;
    Ok(spec)
}

/// Calibrations keyed by step count from the configured record file, or
/// `None` when the run calibrates itself.
fn supplied_calibrations(
    cfg: &RunConfig,
    spec: &QuenchSpec,
) -> Result<Option<BTreeMap<usize, Calibration>>> {
    let q = cfg.quench.as_ref().expect("validated");
    if q.self_calibrate {
        return Ok(None);
    }
    let path = cfg.resolve(q.calibration_file.as_ref().expect("validated"));
    let mut out = BTreeMap::new();
    for steps in spec.step_counts() {
        let tag = format!("nt={steps}");
        let c = latest_calibration(&path, spec.params.n, &tag)?.ok_or_else(|| {
            Error::arg(format!(
                "{} has no calibration for n={} and depth tag {tag:?}",
                path.display(),
                spec.params.n
            ))
        })?;
        out.insert(steps, c);
    }
    Ok(Some(out))
}

pub fn quench(cfg: &RunConfig) -> Result<(QuenchSpec, QuenchResult)> {
    let spec = quench_spec(cfg)?;
    let supplied = supplied_calibrations(cfg, &spec)?;
    let result = run_quench_with(&spec, &cfg.noise_model()?, supplied.as_ref())?;
    Ok((spec, result))
}

#[derive(Serialize)]
struct StepCalibration<'a> {
    steps: usize,
    #[serde(flatten)]
    calibration: &'a Calibration,
    /// Direct short-time value this calibration replaced, if extrapolated.
    #[serde(skip_serializing_if = "Option::is_none")]
    direct_p_tot: Option<f64>,
}

pub(super) fn write_quench(
    dir: &std::path::Path,
    prefix: &str,
    prov: &Provenance,
    result: &QuenchResult,
    extra: &[String],
) -> Result<Vec<std::path::PathBuf>> {
    let mut files = Vec::new();
    let mut comments = prov.comments();
    comments.extend(extra.iter().cloned());
    let path = dir.join(format!("{prefix}.csv"));
    result
        .combined
        .write_csv(BufWriter::new(File::create(&path)?), &comments)?;
    files.push(path);
    for run in &result.runs {
        let mut c = comments.clone();
        c.push(format!("n_t={}", run.n_t));
        let path = dir.join(format!("{prefix}_nt{}.csv", run.n_t));
        run.series
            .write_csv(BufWriter::new(File::create(&path)?), &c)?;
        files.push(path);
    }
    let mut used: BTreeMap<usize, &Calibration> = BTreeMap::new();
    for run in &result.runs {
        used.extend(run.calibrations.iter().map(|(k, v)| (*k, v)));
    }
    let records: Vec<StepCalibration> = used
        .into_iter()
        .map(|(steps, calibration)| StepCalibration {
            steps,
            calibration,
            direct_p_tot: result.trotter.as_ref().map(|_| result.direct[&steps].p_tot),
        })
        .collect();
    let path = dir.join(format!("{prefix}_calibration.jsonl"));
    prov.write_jsonl(&path, &records)?;
    files.push(path);
    if let Some(fit) = &result.trotter {
        let path = dir.join(format!("{prefix}_trotter.json"));
        let mut f = BufWriter::new(File::create(&path)?);
        writeln!(f, "{}", prov.json_line::<TrotterFit>(fit)?)?;
        f.flush()?;
        files.push(path);
    }
    Ok(files)
}

pub(super) fn cmd_quench(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome> {
    let (spec, result) = quench(cfg)?;
    let dir = cfg.out_dir();
    let extra = vec![format!("observable=Z{}", spec.site())];
    let mut files = write_quench(&dir, "quench", prov, &result, &extra)?;
    let mut warnings = Vec::new();
    if result.any_clamped {
        warnings.push("a calibration was clamped to the physical range".to_string());
    }
    let s = &result.combined;
    let mut summary = format!(
        "L2 distance to ED: raw {:.4}, mitigated {:.4}",
        s.raw_distance().unwrap_or(f64::NAN),
        s.mitigated_distance().unwrap_or(f64::NAN)
    );
    if cfg.quench.as_ref().expect("validated").mass_report {
        let report = mass_report(&spec, &result, true)?;
        summary.push_str(&format!(
            "\ndominant frequency {:.4} (ED {:.4}, deviation {:.2}%)",
            report.omega,
            report.ed_gap,
            100.0 * report.deviation
        ));
        warnings.extend(report.flags.iter().map(|f| format!("mass report: {f}")));
        let path = dir.join("quench_mass.jsonl");
        prov.write_jsonl(&path, &[report])?;
        files.push(path);
    }
    Ok(Outcome {
        files,
        warnings,
        summary,
    })
}
