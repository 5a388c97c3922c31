use std::fs::File;
use std::io::BufWriter;

use super::config::RunConfig;
use super::{Outcome, Provenance};
use crate::analysis::{run_meson_masses, uniform_times, MesonConfig, MesonRun, QuenchSpec};
use crate::circuits::TfimParams;
use crate::Result;

/// Runs every `(hz, initial state)` combination; `hz` replaces the value in
/// `[tfim]`. Combination `(h, k)` uses seed `seed + h * states + k`.
pub fn masses(cfg: &RunConfig) -> Result<Vec<MesonRun>> {
    let m = cfg.masses.as_ref().expect("validated");
    let base = cfg.tfim()?;
    let noise = cfg.noise_model()?;
    let mut out = Vec::new();
    for (h, &hz) in m.hz.iter().enumerate() {
        let params = TfimParams::new(base.n, base.j, base.hx, hz)?;
        let seed = cfg.seed.wrapping_add((h * m.initial_states.len()) as u64);
        let mut quench = QuenchSpec::new(
            params,
            Vec::new(),
            uniform_times(m.points, m.t_max),
            m.n_t.clone(),
            m.shots,
            seed,
        );
        quench.site = m.site;
        quench.epsilon = m.epsilon;
        quench.extrapolate = m.extrapolate;
        let mc = MesonConfig {
            quench,
            mitigate: m.mitigate,
        };
        out.extend(run_meson_masses(&params, &m.initial_states, &mc, &noise)?);
    }
    Ok(out)
}

pub(super) fn cmd_masses(cfg: &RunConfig, prov: &Provenance) -> Result<Outcome> {
    let runs = masses(cfg)?;
    let dir = cfg.out_dir();
    let mut files = Vec::new();
    let mut warnings = Vec::new();
    let mut summary = Vec::new();
    for run in &runs {
        let r = &run.report;
        if let Some(result) = &run.result {
            let mut comments = prov.comments();
            comments.push(format!("hz={} state={}", r.hz, r.label));
            let path = dir.join(format!("masses_hz{}_{}.csv", r.hz, r.label));
            result
                .combined
                .write_csv(BufWriter::new(File::create(&path)?), &comments)?;
            files.push(path);
        }
        warnings.extend(
            r.flags
                .iter()
                .map(|f| format!("hz={} state={}: {f}", r.hz, r.label)),
        );
        summary.push(format!(
            "hz={} state={}: omega {:.4} +- {:.4} (raw {:.4}), ED {:.4} levels {:?}, deviation {:.2}%",
            r.hz,
            r.label,
            r.omega,
            r.omega_sigma,
            r.raw_omega,
            r.ed_gap,
            r.ed_levels,
            100.0 * r.deviation
        ));
    }
    let path = dir.join("masses.jsonl");
    let reports: Vec<_> = runs.iter().map(|r| &r.report).collect();
    prov.write_jsonl(&path, &reports)?;
    files.insert(0, path);
    Ok(Outcome {
        files,
        warnings,
        summary: summary.join("\n"),
    })
}
