//! Trace and single-observable mitigation on random brickwork circuits.
//!
//! A reduced version of `configs/brickwork_bench.toml`; pass `full` to run
//! the full configuration.

use std::path::PathBuf;

use depolarize::experiments::{brickwork_bench, RunConfig};

fn main() -> depolarize::Result<()> {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/brickwork_bench.toml");
    let mut cfg = RunConfig::load(path)?;
    if std::env::args().nth(1).as_deref() != Some("full") {
        let b = cfg.brickwork.as_mut().expect("config has [brickwork]");
        b.depths = vec![6, 12];
        b.points = 10;
        b.operators.retain(|o| o.name != "z");
    }
    let (_, summaries) = brickwork_bench(&cfg)?;
    println!(
        "{:>10} {:>5} {:>7} {:>7} {:>8} {:>8} {:>8}",
        "operator", "depth", "p_trace", "p_single", "raw", "trace", "single"
    );
    for s in &summaries {
        println!(
            "{:>10} {:>5} {:7.3} {:7.3} {:8.4} {:8.4} {:8.4} {}",
            s.operator,
            s.depth,
            s.p_trace,
            s.p_single,
            s.rms_raw,
            s.rms_trace,
            s.rms_single,
            s.single_flag
        );
    }
    Ok(())
}
