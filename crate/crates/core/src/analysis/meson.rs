//! Meson masses from the dominant oscillation of a quenched magnetization.

use serde::{Deserialize, Serialize};

use super::fit::{fit_with_seed, CosineFit};
use super::quench::{run_quench, QuenchResult, QuenchSpec};
use crate::circuits::{domain_state, tfim_hamiltonian, Spectrum, TfimParams};
use crate::noise::NoiseModel;
use crate::qstate::PauliObservable;
use crate::{Error, Result};

/// Quench settings shared by all initial states.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MesonConfig {
    /// Template; its `params` and `flips` are replaced per run.
    pub quench: QuenchSpec,
    /// Fit the mitigated series (otherwise the raw one).
    #[serde(default = "yes")]
    pub mitigate: bool,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MesonMassReport {
    /// Initial basis state, written with qubit 0 first (`0` = up).
    pub label: String,
    pub hx: f64,
    pub hz: f64,
    pub omega: f64,
    pub omega_sigma: f64,
    /// Frequency fitted to the unmitigated series.
    pub raw_omega: f64,
    /// Frequency of the strongest line of the exact signal.
    pub ed_gap: f64,
    /// Eigenlevel indices `(lower, upper)` of that line.
    pub ed_levels: (usize, usize),
    /// Weight of that line over the weight of the next strongest one.
    pub ed_dominance: f64,
    /// Coefficient of determination of the fit to the reported series.
    pub r_squared: f64,
    pub deviation: f64,
    pub raw_deviation: f64,
    pub fit: Option<CosineFit>,
    pub flags: Vec<String>,
}

impl MesonMassReport {
    pub fn is_flagged(&self) -> bool {
        !self.flags.is_empty()
    }
}

pub fn state_label(n: usize, flips: &[usize]) -> String {
    (0..n)
        .map(|q| {
            if flips.iter().filter(|&&f| f == q).count() % 2 == 1 {
                '1'
            } else {
                '0'
            }
        })
        .collect()
}

/// Below this weight ratio between the two strongest lines no single line
/// dominates.
pub const DOMINANCE_THRESHOLD: f64 = 1.5;

/// Fits explaining less of the variance than this are flagged.
pub const MIN_R_SQUARED: f64 = 0.9;

fn r_squared(times: &[f64], values: &[f64], fit: &CosineFit) -> f64 {
    let mean = values.iter().sum::<f64>() / values.len() as f64;
    let tot: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    let res: f64 = times
        .iter()
        .zip(values)
        .map(|(&t, v)| (v - fit.params.eval(t)).powi(2))
        .sum();
    if tot > 0.0 {
        1.0 - res / tot
    } else {
        0.0
    }
}

/// Report carrying only the exact-spectrum fields for a quench from `spec`.
fn ed_report(spectrum: &Spectrum, spec: &QuenchSpec) -> Result<MesonMassReport> {
    let params = &spec.params;
    let psi0 = domain_state(params.n, &spec.flips)?;
    let obs = PauliObservable::z(params.n, spec.site());
    let lines = spectrum.spectral_lines(&psi0, &obs)?;
    let mut flags = Vec::new();
    let (ed_gap, ed_levels, ed_dominance) = match lines.first() {
        Some(l) => (
            l.omega,
            (l.lower, l.upper),
            lines.get(1).map_or(f64::INFINITY, |m| l.weight / m.weight),
        ),
        None => {
            flags.push("no_oscillation".to_string());
            (f64::NAN, (0, 0), 0.0)
        }
    };
    if params.hz == 0.0 {
        flags.push("free_fermion_regime".into());
    }
    if ed_dominance < DOMINANCE_THRESHOLD {
        flags.push("no_dominant_line".into());
    }
    Ok(MesonMassReport {
        label: state_label(params.n, &spec.flips),
        hx: params.hx,
        hz: params.hz,
        omega: f64::NAN,
        omega_sigma: f64::NAN,
        raw_omega: f64::NAN,
        ed_gap,
        ed_levels,
        ed_dominance,
        r_squared: f64::NAN,
        deviation: f64::NAN,
        raw_deviation: f64::NAN,
        fit: None,
        flags,
    })
}

fn positive(v: &[f64]) -> Option<&[f64]> {
    Some(v).filter(|v| v.iter().all(|x| *x > 0.0))
}

/// Fits the combined series of a finished quench and compares the dominant
/// frequency with the exact spectrum. `mitigate` selects the fitted column.
pub fn mass_report(
    spec: &QuenchSpec,
    result: &QuenchResult,
    mitigate: bool,
) -> Result<MesonMassReport> {
    let spectrum = Spectrum::of(&tfim_hamiltonian(&spec.params)?)?;
    fill_report(ed_report(&spectrum, spec)?, result, mitigate)
}

fn fill_report(
    mut report: MesonMassReport,
    result: &QuenchResult,
    mitigate: bool,
) -> Result<MesonMassReport> {
    if result.any_clamped {
        report.flags.push("calibration_clamped".into());
    }
    let s = &result.combined;
    let raw_fit = fit_with_seed(&s.times, &s.raw, positive(&s.raw_sigma))?;
    let (vals, sig) = if mitigate {
        (&s.mitigated, &s.mitigated_sigma)
    } else {
        (&s.raw, &s.raw_sigma)
    };
    let fit = fit_with_seed(&s.times, vals, positive(sig))?;
    if !fit.converged {
        report.flags.push("fit_not_converged".into());
    }
    if !fit.identifiable {
        report.flags.push("fit_unidentifiable".into());
    }
    report.r_squared = r_squared(&s.times, vals, &fit);
    if report.r_squared < MIN_R_SQUARED {
        report.flags.push("poor_fit".into());
    }
    report.omega = fit.params.omega;
    report.omega_sigma = fit.omega_sigma();
    report.raw_omega = raw_fit.params.omega;
    report.deviation = (report.omega - report.ed_gap).abs() / report.ed_gap;
    report.raw_deviation = (report.raw_omega - report.ed_gap).abs() / report.ed_gap;
    report.fit = Some(fit);
    Ok(report)
}

/// A mass report with the quench it was fitted to; `result` is `None` when
/// the calibration found the state fully depolarized.
#[derive(Debug, Clone, PartialEq)]
pub struct MesonRun {
    pub spec: QuenchSpec,
    pub report: MesonMassReport,
    pub result: Option<QuenchResult>,
}

/// For every initial state, runs the noisy quench, fits a damped cosine and
/// compares its frequency with the dominant exact spectral line. State `k`
/// uses seed `quench.seed + k`.
pub fn run_meson_masses(
    params: &TfimParams,
    initial_states: &[Vec<usize>],
    cfg: &MesonConfig,
    noise: &NoiseModel,
) -> Result<Vec<MesonRun>> {
    params.validate()?;
    if initial_states.is_empty() {
        return Err(Error::arg("no initial states"));
    }
    let spectrum = Spectrum::of(&tfim_hamiltonian(params)?)?;
    let mut out = Vec::with_capacity(initial_states.len());
    for (k, flips) in initial_states.iter().enumerate() {
        let mut spec = cfg.quench.clone();
        spec.params = *params;
        spec.flips = flips.clone();
        spec.seed = cfg.quench.seed.wrapping_add(k as u64);
        let mut report = ed_report(&spectrum, &spec)?;
        match run_quench(&spec, noise) {
            Ok(r) => out.push(MesonRun {
                report: fill_report(report, &r, cfg.mitigate)?,
                spec,
                result: Some(r),
            }),
            Err(Error::FullyDepolarized) => {
                report.flags.push("fully_depolarized".into());
                out.push(MesonRun {
                    spec,
                    report,
                    result: None,
                });
            }
            Err(e) => return Err(e),
        }
    }
    Ok(out)
}

/// [`run_meson_masses`] without the underlying series.
pub fn extract_meson_masses(
    params: &TfimParams,
    initial_states: &[Vec<usize>],
    cfg: &MesonConfig,
    noise: &NoiseModel,
) -> Result<Vec<MesonMassReport>> {
    Ok(run_meson_masses(params, initial_states, cfg, noise)?
        .into_iter()
        .map(|r| r.report)
        .collect())
}

/// JSON-lines, one report per line.
pub fn write_reports<W: std::io::Write>(mut out: W, reports: &[MesonMassReport]) -> Result<()> {
    for r in reports {
        writeln!(out, "{}", serde_json::to_string(r)?)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::uniform_times;

    #[test]
    fn labels() {
        assert_eq!(state_label(5, &[1, 3]), "01010");
        assert_eq!(state_label(3, &[]), "000");
    }

    #[test]
    fn free_fermion_point_is_flagged() {
        let p = TfimParams::new(4, 1.0, 0.75, 0.0).unwrap();
        let q = QuenchSpec::new(p, vec![], uniform_times(12, 2.5), vec![10], 0, 0);
        let r = extract_meson_masses(
            &p,
            &[vec![]],
            &MesonConfig {
                quench: q,
                mitigate: true,
            },
            &NoiseModel::ideal(),
        )
        .unwrap();
        assert!(r[0].flags.iter().any(|f| f == "free_fermion_regime"));
    }
}
