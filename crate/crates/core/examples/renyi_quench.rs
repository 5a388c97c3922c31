//! Half-chain Rényi entropy after a quench, estimated from randomized
//! measurements under thermal-relaxation noise.
//!
//! Uses `configs/renyi.toml`; an optional argument overrides `hz`.

use std::path::PathBuf;

use depolarize::experiments::{renyi, RunConfig};

fn main() -> depolarize::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/renyi.toml");
    let mut cfg = RunConfig::load(path)?;
    if let Some(hz) = std::env::args().nth(1) {
        cfg.tfim.as_mut().expect("config has [tfim]").hz = hz.parse().expect("hz is a number");
    }
    let (subsystem, points, _) = renyi(&cfg)?;
    println!("subsystem {subsystem:?}");
    println!(
        "{:>5} {:>3} {:>7} {:>7} {:>15} {:>7}",
        "t", "N_T", "p_tot", "raw", "mitigated", "ED"
    );
    for p in &points {
        println!(
            "{:5.2} {:3} {:7.3} {:7.3} {:7.3} +- {:5.3} {:7.3}{}",
            p.t,
            p.steps,
            p.p_tot,
            p.raw,
            p.mitigated,
            p.mitigated_sigma,
            p.exact,
            if p.clamped { "  (clamped)" } else { "" }
        );
    }
    Ok(())
}
