//! Time series, damped-cosine fitting and meson-mass extraction.

mod fit;
mod meson;
mod quench;
mod sampling;
mod timeseries;

pub use fit::{
    fit_damped_cosine, fit_with_seed, frequency_seed, CosineFit, CosineParams, FrequencySeed,
    MAX_ITERATIONS,
};
pub use meson::{
    extract_meson_masses, mass_report, run_meson_masses, state_label, write_reports, MesonConfig,
    MesonMassReport, MesonRun, DOMINANCE_THRESHOLD, MIN_R_SQUARED,
};
pub use quench::{run_quench, run_quench_with, uniform_times, QuenchResult, QuenchRun, QuenchSpec};
pub use sampling::sample_expectation;
pub use timeseries::TimeSeries;
