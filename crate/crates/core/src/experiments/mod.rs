//! Configurable end-to-end runs that write plot-ready CSV and JSON-lines
//! files.
//!
//! A run is described by a TOML [`RunConfig`]. Every output file carries the
//! SHA-256 of the effective config (plus the bytes of every file it
//! references) and the seed, so results can be traced back to their inputs.
//! All randomness is derived from the seed through per-item streams, which
//! makes the output bytes independent of the thread count.
//!
//! ```toml
//! kind = "quench"
//! seed = 7
//! out = "out/quench"
//! noise = "noise/depolarizing.json"
//!
//! [tfim]
//! n = 7
//! hx = 0.5
//! hz = 0.75
//!
//! [quench]
//! t_max = 3.0
//! points = 31
//! n_t = [5, 6]
//! extrapolate = true
//! ```

use std::path::PathBuf;

use rand::Rng;

mod bench;
mod calibrate;
pub mod config;
mod masses;
mod provenance;
mod quench;
mod renyi;

pub use bench::{brickwork_bench, BenchRow, BenchSummary};
pub use calibrate::{calibrate, CalibrationRecord};
pub use config::{CalibrationMethod, Kind, Overrides, RunConfig};
pub use masses::masses;
pub use provenance::Provenance;
pub use quench::{quench, quench_spec};
pub use renyi::{renyi, RenyiPoint};

use crate::rng::stream_rng;
use crate::{Error, Result};

/// Files written by a run, conditions that deserve attention, and a short
/// human-readable report.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub files: Vec<PathBuf>,
    pub warnings: Vec<String>,
    pub summary: String,
}

impl Outcome {
    /// Process exit code: `0` clean, `2` clamped or flagged results.
    pub fn exit_code(&self) -> i32 {
        if self.warnings.is_empty() {
            0
        } else {
            2
        }
    }
}

/// Uniform angles on `[0, 2 pi)`.
pub(crate) fn random_angles(seed: u64, stream: u64, count: usize) -> Vec<f64> {
    let mut rng = stream_rng(seed, stream);
    (0..count)
        .map(|_| rng.random_range(0.0..std::f64::consts::TAU))
        .collect()
}

/// Validates the config, creates the output directory and runs it on a
/// thread pool of the configured size.
pub fn run(cfg: &RunConfig) -> Result<Outcome> {
    cfg.validate()?;
    let prov = Provenance::of(cfg)?;
    std::fs::create_dir_all(cfg.out_dir())?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(t) = cfg.threads {
        pool = pool.num_threads(t);
    }
    let pool = pool
        .build()
        .map_err(|e| Error::arg(format!("thread pool: {e}")))?;
    pool.install(|| match cfg.kind {
        Kind::Calibrate => calibrate::cmd_calibrate(cfg, &prov),
        Kind::Quench => quench::cmd_quench(cfg, &prov),
        Kind::Renyi => renyi::cmd_renyi(cfg, &prov),
        Kind::Masses => masses::cmd_masses(cfg, &prov),
        Kind::BrickworkBench => bench::cmd_brickwork_bench(cfg, &prov),
    })
}
