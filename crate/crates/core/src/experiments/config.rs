use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::circuits::TfimParams;
use crate::mitigation::SigmaMode;
use crate::noise::NoiseModel;
use crate::qstate::PauliObservable;
use crate::randmeas::Resampler;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Kind {
    Calibrate,
    Quench,
    Renyi,
    Masses,
    BrickworkBench,
}

impl Kind {
    pub fn name(self) -> &'static str {
        match self {
            Kind::Calibrate => "calibrate",
            Kind::Quench => "quench",
            Kind::Renyi => "renyi",
            Kind::Masses => "masses",
            Kind::BrickworkBench => "brickwork-bench",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationMethod {
    #[default]
    Purity,
    Known,
}

/// How the purity of a noisy state is obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PuritySource {
    /// Randomized measurements with the configured plan.
    #[default]
    Randomized,
    /// `Tr[rho^2]` of the simulated density matrix.
    Exact,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ResamplerChoice {
    #[default]
    Jackknife,
    Bootstrap,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaChoice {
    #[default]
    Implicit,
    Printed,
}

impl From<SigmaChoice> for SigmaMode {
    fn from(c: SigmaChoice) -> Self {
        match c {
            SigmaChoice::Implicit => SigmaMode::Implicit,
            SigmaChoice::Printed => SigmaMode::Printed,
        }
    }
}

fn default_out() -> PathBuf {
    PathBuf::from("out")
}

fn default_epsilon() -> f64 {
    0.01
}

fn default_n_u() -> usize {
    800
}

fn default_n_m() -> usize {
    8192
}

fn default_shots() -> u64 {
    8192
}

fn default_bootstrap() -> usize {
    200
}

fn yes() -> bool {
    true
}

/// One experiment run, read from TOML. Relative paths resolve against the
/// directory of the config file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub kind: Kind,
    pub seed: u64,
    #[serde(default = "default_out")]
    pub out: PathBuf,
    /// Noise-model JSON; absent means ideal gates.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub noise: Option<PathBuf>,
    /// Written into calibration records instead of the wall clock.
    #[serde(default)]
    pub timestamp: u64,
    /// Worker threads; does not change any output byte.
    #[serde(default, skip_serializing)]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tfim: Option<TfimParams>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibrate: Option<CalibrateSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quench: Option<QuenchSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub renyi: Option<RenyiSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub masses: Option<MassesSection>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub brickwork: Option<BrickworkSection>,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CalibrationCircuit {
    /// Trotterized Ising evolution from `[tfim]`.
    #[default]
    Tfim,
    /// Random-angle brickwork circuit.
    Brickwork,
    /// Circuit text file.
    File,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrateSection {
    #[serde(default)]
    pub method: CalibrationMethod,
    #[serde(default)]
    pub circuit: CalibrationCircuit,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circuit_file: Option<PathBuf>,
    /// Evolution time of the Ising circuit.
    #[serde(default)]
    pub t: f64,
    #[serde(default = "default_nt")]
    pub n_t: usize,
    #[serde(default)]
    pub flips: Vec<usize>,
    /// Brickwork width and depth.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    #[serde(default)]
    pub depth: usize,
    /// Independent calibrations whose mean is also recorded.
    #[serde(default = "one_usize")]
    pub repeats: usize,
    #[serde(default)]
    pub purity_source: PuritySource,
    #[serde(default = "default_n_u")]
    pub n_u: usize,
    #[serde(default = "default_n_m")]
    pub n_m: usize,
    #[serde(default)]
    pub sigma_mode: SigmaChoice,
    /// Operator file for the known-observable route; default is `Z` on the
    /// central qubit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub observable: Option<PathBuf>,
    /// Ideal value of the observable; default is a noiseless simulation.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub known_value: Option<f64>,
    #[serde(default = "default_cal_shots")]
    pub shots: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub depth_tag: Option<String>,
}

fn default_nt() -> usize {
    1
}

fn one_usize() -> usize {
    1
}

fn default_cal_shots() -> u64 {
    40960
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuenchSection {
    #[serde(default)]
    pub flips: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    pub t_max: f64,
    pub points: usize,
    pub n_t: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dt: Option<f64>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default)]
    pub extrapolate: bool,
    /// Calibrate from short-time circuits; otherwise `calibration_file`
    /// must supply a record for every step count.
    #[serde(default = "yes")]
    pub self_calibrate: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub calibration_file: Option<PathBuf>,
    /// Also fit the dominant frequency and write a mass report.
    #[serde(default)]
    pub mass_report: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RenyiSection {
    #[serde(default)]
    pub flips: Vec<usize>,
    pub t_max: f64,
    pub points: usize,
    pub n_t: usize,
    /// If set, a time point uses at least `ceil(t / max_dt)` steps.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub max_dt: Option<f64>,
    #[serde(default = "default_n_u")]
    pub n_u: usize,
    #[serde(default = "default_n_m")]
    pub n_m: usize,
    /// Subsystem `A`; default is the left half of the chain.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subsystem: Option<Vec<usize>>,
    #[serde(default)]
    pub resampler: ResamplerChoice,
    #[serde(default = "default_bootstrap")]
    pub bootstrap_samples: usize,
    #[serde(default)]
    pub sigma_mode: SigmaChoice,
    /// Write the raw shot records of every time point.
    #[serde(default)]
    pub write_records: bool,
}

impl RenyiSection {
    pub fn steps(&self, t: f64) -> usize {
        match self.max_dt {
            Some(dt) => self.n_t.max((t / dt - 1e-12).ceil() as usize),
            None => self.n_t,
        }
    }

    pub fn resampler(&self, seed: u64) -> Resampler {
        match self.resampler {
            ResamplerChoice::Jackknife => Resampler::Jackknife,
            ResamplerChoice::Bootstrap => Resampler::Bootstrap {
                samples: self.bootstrap_samples,
                seed,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MassesSection {
    pub hz: Vec<f64>,
    pub initial_states: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub site: Option<usize>,
    pub t_max: f64,
    pub points: usize,
    pub n_t: Vec<usize>,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "yes")]
    pub extrapolate: bool,
    #[serde(default = "yes")]
    pub mitigate: bool,
}

/// Operator measured in the brickwork benchmark; exactly one source field
/// is set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorSpec {
    pub name: String,
    /// Register width for the `z` and `tfim` sources.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n: Option<usize>,
    /// Single `Z` on this qubit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<usize>,
    /// Ising Hamiltonian with fields `[j, hx, hz]`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tfim: Option<[f64; 3]>,
    /// A single Pauli string such as `XYZIXX`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pauli: Option<String>,
    /// Operator file, one `coefficient PAULISTRING` term per line.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<PathBuf>,
}

impl OperatorSpec {
    pub fn build(&self, base: &Path) -> Result<PauliObservable> {
        let need_n = || {
            self.n
                .ok_or_else(|| Error::arg(format!("operator {:?} needs `n`", self.name)))
        };
        match (&self.z, &self.tfim, &self.pauli, &self.file) {
            (Some(q), None, None, None) => {
                let n = need_n()?;
                if *q >= n {
                    return Err(Error::QubitOutOfRange { index: *q, n });
                }
                Ok(PauliObservable::z(n, *q))
            }
            (None, Some([j, hx, hz]), None, None) => {
                crate::circuits::tfim_hamiltonian(&TfimParams::new(need_n()?, *j, *hx, *hz)?)
            }
            (None, None, Some(s), None) => PauliObservable::parse(&format!("1 {s}")),
            (None, None, None, Some(f)) => {
                let path = base.join(f);
                PauliObservable::load(&path)
                    .map_err(|e| Error::Format(format!("{}: {e}", path.display())))
            }
            _ => Err(Error::arg(format!(
                "operator {:?} needs exactly one of `z`, `tfim`, `pauli`, `file`",
                self.name
            ))),
        }
    }
}

fn default_depths() -> Vec<usize> {
    vec![18]
}

fn default_points() -> usize {
    30
}

fn default_parameterizations() -> usize {
    5
}

fn default_bench_n_u() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BrickworkSection {
    #[serde(default = "default_depths")]
    pub depths: Vec<usize>,
    #[serde(default = "default_points")]
    pub points: usize,
    pub operators: Vec<OperatorSpec>,
    /// Shots per Pauli term for every benchmark point.
    #[serde(default = "default_shots")]
    pub shots: u64,
    /// Shots per Pauli term for the single-observable calibration circuit.
    #[serde(default = "default_cal_shots")]
    pub calibration_shots: u64,
    /// Random parameterizations averaged by the purity calibration.
    #[serde(default = "default_parameterizations")]
    pub parameterizations: usize,
    #[serde(default)]
    pub purity_source: PuritySource,
    #[serde(default = "default_bench_n_u")]
    pub n_u: usize,
    #[serde(default = "default_n_m")]
    pub n_m: usize,
}

/// Command-line values that replace config entries.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub method: Option<CalibrationMethod>,
    pub n_t: Option<usize>,
    pub depth: Option<usize>,
    pub threads: Option<usize>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Format(format!("config: {e}")))
    }

    /// Reads a config; relative paths inside it resolve against its directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Format(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        cfg.base_dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) {
        if let Some(s) = o.seed {
            self.seed = s;
        }
        if let Some(out) = &o.out {
            // command-line paths are relative to the working directory
            self.out = std::env::current_dir()
                .map(|d| d.join(out))
                .unwrap_or(out.clone());
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        if let Some(m) = o.method {
            if let Some(c) = &mut self.calibrate {
                c.method = m;
            }
        }
        if let Some(nt) = o.n_t {
            if let Some(c) = &mut self.calibrate {
                c.n_t = nt;
            }
            if let Some(q) = &mut self.quench {
                q.n_t = vec![nt];
            }
            if let Some(r) = &mut self.renyi {
                r.n_t = nt;
            }
            if let Some(m) = &mut self.masses {
                m.n_t = vec![nt];
            }
        }
        if let Some(d) = o.depth {
            if let Some(c) = &mut self.calibrate {
                c.depth = d;
            }
            if let Some(b) = &mut self.brickwork {
                b.depths = vec![d];
            }
        }
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        self.base_dir.join(p)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.resolve(&self.out)
    }

    pub fn noise_model(&self) -> Result<NoiseModel> {
        match &self.noise {
            Some(p) => NoiseModel::load(self.resolve(p)),
            None => Ok(NoiseModel::ideal()),
        }
    }

    pub fn tfim(&self) -> Result<TfimParams> {
        let p = self.tfim.ok_or_else(|| {
            Error::arg(format!("{} run needs a [tfim] section", self.kind.name()))
        })?;
        p.validate()?;
        Ok(p)
    }

    /// Files the run reads besides the config itself.
    pub fn referenced_files(&self) -> Vec<PathBuf> {
        let mut files: Vec<PathBuf> = self.noise.iter().cloned().collect();
        if let Some(c) = &self.calibrate {
            files.extend(c.circuit_file.iter().cloned());
            files.extend(c.observable.iter().cloned());
        }
        if let Some(q) = &self.quench {
            files.extend(q.calibration_file.iter().cloned());
        }
        if let Some(b) = &self.brickwork {
            files.extend(b.operators.iter().filter_map(|o| o.file.clone()));
        }
        files
    }

    /// Checks the section for the run kind and that referenced files exist.
    pub fn validate(&self) -> Result<()> {
        for f in self.referenced_files() {
            let p = self.resolve(&f);
            if !p.is_file() {
                return Err(Error::arg(format!(
                    "referenced file {} does not exist",
                    p.display()
                )));
            }
        }
        if self.threads == Some(0) {
            return Err(Error::arg("threads must be positive"));
        }
        let missing =
            |s: &str| Error::arg(format!("{} run needs a [{s}] section", self.kind.name()));
        match self.kind {
            Kind::Calibrate => {
                let c = self
                    .calibrate
                    .as_ref()
                    .ok_or_else(|| missing("calibrate"))?;
                if c.repeats == 0 {
                    return Err(Error::arg("repeats must be positive"));
                }
                match c.circuit {
                    CalibrationCircuit::Tfim => {
                        self.tfim()?;
                    }
                    CalibrationCircuit::Brickwork => {
                        if c.n.is_none() {
                            return Err(Error::arg("brickwork calibration needs `n`"));
                        }
                    }
                    CalibrationCircuit::File => {
                        if c.circuit_file.is_none() {
                            return Err(Error::arg("file calibration needs `circuit_file`"));
                        }
                    }
                }
            }
            Kind::Quench => {
                self.tfim()?;
                let q = self.quench.as_ref().ok_or_else(|| missing("quench"))?;
                if !q.self_calibrate && q.calibration_file.is_none() {
                    return Err(Error::arg(
                        "self-calibration is disabled and no calibration_file is given",
                    ));
                }
            }
            Kind::Renyi => {
                self.tfim()?;
                let r = self.renyi.as_ref().ok_or_else(|| missing("renyi"))?;
                if r.n_t == 0 || r.max_dt.is_some_and(|d| !(d > 0.0)) {
                    return Err(Error::arg("renyi needs n_t >= 1 and a positive max_dt"));
                }
                if r.n_u < 2 || r.n_m < 2 {
                    return Err(Error::arg(format!(
                        "randomized measurements need n_u >= 2 and n_m >= 2, got {} and {}",
                        r.n_u, r.n_m
                    )));
                }
            }
            Kind::Masses => {
                self.tfim()?;
                let m = self.masses.as_ref().ok_or_else(|| missing("masses"))?;
                if m.hz.is_empty() || m.initial_states.is_empty() {
                    return Err(Error::arg(
                        "masses need at least one hz and one initial state",
                    ));
                }
            }
            Kind::BrickworkBench => {
                let b = self
                    .brickwork
                    .as_ref()
                    .ok_or_else(|| missing("brickwork"))?;
                if b.operators.is_empty() || b.depths.is_empty() || b.points == 0 {
                    return Err(Error::arg("benchmark needs operators, depths and points"));
                }
                if b.parameterizations < 2 {
                    return Err(Error::arg(
                        "purity calibration needs at least 2 parameterizations",
                    ));
                }
            }
        }
        Ok(())
    }
}
