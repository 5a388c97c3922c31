//! Builds a gate noise model, round-trips it through JSON and measures how
//! close its effect on a deep circuit is to whole-register depolarizing.

use std::path::PathBuf;

use depolarize::circuits::{brickwork_angle_count, build_brickwork};
use depolarize::noise::{
    best_fit_global, depolarizing_channel, run_noisy, thermal_relaxation_channel, NoiseModel,
};
use depolarize::qstate::{DensityMatrix, Statevector};

fn main() -> depolarize::Result<()> {
    let model = NoiseModel::ideal()
        .with_rule("u3", None, depolarizing_channel(3e-4, 1)?)?
        .with_rule(
            "u3",
            None,
            thermal_relaxation_channel(120.0, 100.0, 0.071, 0.0)?,
        )?
        .with_rule("cnot", None, depolarizing_channel(5e-3, 2)?)?
        .with_rule(
            "cnot",
            None,
            thermal_relaxation_channel(120.0, 100.0, 0.35, 0.0)?,
        )?;
    let json = model.to_json()?;
    let model = NoiseModel::from_json(&json)?;
    println!("{} rules after JSON round trip", model.rules().len());

    let file = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/noise/device_like.json");
    let device = NoiseModel::load(&file)?;

    let n = 5;
    for depth in [2, 6, 12, 18] {
        let angles: Vec<f64> = (0..brickwork_angle_count(n, depth))
            .map(|i| 0.37 * i as f64)
            .collect();
        let circ = build_brickwork(n, depth, &angles)?;
        let ideal = DensityMatrix::from_pure(&circ.apply_to_statevector(&Statevector::zero(n)?)?);
        for (name, m) in [("built", &model), ("file", &device)] {
            let noisy = run_noisy(&circ, m, &DensityMatrix::basis(n, 0)?)?;
            let (p, dist) = best_fit_global(&noisy, &ideal)?;
            println!(
                "depth {depth:>2} {name:>5}: purity {:.4}, global fit p {p:.4}, residual {dist:.4}",
                noisy.purity()
            );
        }
    }
    Ok(())
}
