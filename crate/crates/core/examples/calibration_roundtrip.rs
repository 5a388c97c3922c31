//! Calibrate `p_tot` two ways on a noisy Trotter circuit, store the results
//! and use them to mitigate a magnetization.

use depolarize::analysis::sample_expectation;
use depolarize::circuits::{build_tfim_trotter, domain_state, TfimParams};
use depolarize::mitigation::{
    append_calibration, calibrate_known_observable, calibrate_purity, latest_calibration,
    mitigate_expectation, KnownObservableSpec, SigmaMode,
};
use depolarize::noise::{best_fit_global, run_noisy, NoiseModel};
use depolarize::qstate::{DensityMatrix, PauliObservable};
use depolarize::randmeas::{measure_purity, MeasurementPlan, Resampler};
use rand::SeedableRng;

fn main() -> depolarize::Result<()> {
    let params = TfimParams::new(5, 1.0, 0.5, 0.75)?;
    let noise = NoiseModel::depolarizing(0.001, 0.01)?;
    let psi0 = domain_state(5, &[])?;
    let rho0 = DensityMatrix::from_pure(&psi0);

    // a near-identity circuit with the same gate structure as the real run
    let circ = build_tfim_trotter(&params, 0.01, 4)?;
    let noisy = run_noisy(&circ, &noise, &rho0)?;
    let ideal = DensityMatrix::from_pure(&circ.apply_to_statevector(&psi0)?);
    let (p_fit, dist) = best_fit_global(&noisy, &ideal)?;
    println!("best global fit: p = {p_fit:.4}, residual trace distance {dist:.2e}");

    let plan = MeasurementPlan::full(5, 400, 2048, 1)?;
    let est = measure_purity(&noisy, &plan, Resampler::Jackknife)?;
    let by_purity = calibrate_purity(est.value, est.sigma, 5, SigmaMode::Implicit)?.tagged("nt=4");
    println!(
        "purity {:.4} +- {:.4} -> p = {:.4} +- {:.4}",
        est.value, est.sigma, by_purity.p_tot, by_purity.sigma_p
    );

    let z = PauliObservable::z(5, 2);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
    let (m, s) = sample_expectation(&noisy, &z, 40960, &mut rng)?;
    let spec = KnownObservableSpec::new(z.clone(), psi0.expectation(&z)?, 0.01)?;
    let by_known = calibrate_known_observable(m, s, &spec, 5)?.tagged("nt=4");
    println!(
        "<Z2> = {m:.4} -> p = {:.4} +- {:.4}",
        by_known.p_tot, by_known.sigma_p
    );

    let dir = std::env::temp_dir().join("depolarize-example");
    std::fs::create_dir_all(&dir)?;
    let store = dir.join("calibration.jsonl");
    let _ = std::fs::remove_file(&store);
    append_calibration(&store, &by_purity)?;
    append_calibration(&store, &by_known.clone().at(1))?;
    let cal = latest_calibration(&store, 5, "nt=4")?.expect("just written");
    println!(
        "latest record in {}: {:?}, p = {:.4}",
        store.display(),
        cal.method,
        cal.p_tot
    );

    let t = 1.2;
    let circ = build_tfim_trotter(&params, t, 4)?;
    let exact = circ.apply_to_statevector(&psi0)?.expectation(&z)?;
    let (m, s) = sample_expectation(&run_noisy(&circ, &noise, &rho0)?, &z, 8192, &mut rng)?;
    let fixed = mitigate_expectation(m, s, &z, &cal)?;
    println!(
        "t = {t}: raw {m:.4}, mitigated {:.4} +- {:.4}, Trotter circuit without noise {exact:.4}",
        fixed.value, fixed.sigma
    );
    Ok(())
}
