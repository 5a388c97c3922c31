//! Error per Trotter step from short-time calibrations at a few step counts,
//! checked against the purity of the full-length noisy circuits.

use depolarize::circuits::{build_tfim_trotter, domain_state, TfimParams};
use depolarize::mitigation::{solve_ptot_from_purity, trotter_extrapolate};
use depolarize::noise::{run_noisy, NoiseModel};
use depolarize::qstate::DensityMatrix;

fn main() -> depolarize::Result<()> {
    let params = TfimParams::new(5, 1.0, 0.5, 0.75)?;
    let noise = NoiseModel::depolarizing(5e-4, 5e-3)?;
    let rho0 = DensityMatrix::from_pure(&domain_state(5, &[])?);
    let p_at = |t: f64, steps: usize| -> depolarize::Result<f64> {
        let rho = run_noisy(&build_tfim_trotter(&params, t, steps)?, &noise, &rho0)?;
        Ok(solve_ptot_from_purity(rho.purity(), 5)?.p_tot)
    };

    let short: Vec<(usize, f64)> = [2, 3, 4]
        .iter()
        .map(|&s| Ok((s, p_at(0.01, s)?)))
        .collect::<depolarize::Result<_>>()?;
    let fit = trotter_extrapolate(&short)?;
    println!("p per step {:.5}", fit.p_step);
    for steps in [4, 8, 16] {
        println!(
            "N_T = {steps:>2}: predicted {:.4}, at t = 2 {:.4}",
            fit.predict(steps),
            p_at(2.0, steps)?
        );
    }
    Ok(())
}
