//! Kraus channels, gate-attached noise models and noisy execution.
//!
//! Channels act after the ideal gate they are attached to. Execution is
//! deterministic density-matrix propagation.

mod channel;
mod global;
mod model;
mod run;

pub use channel::{
    apply_channel, depolarizing_channel, thermal_relaxation_channel, ChannelKind, KrausChannel,
};
pub use global::{best_fit_global, compose_global, global_depolarize, GlobalDepolarizingParams};
pub use model::{ChannelSpec, NoiseModel, NoiseRule, ThermalSpec};
pub use run::run_noisy;
