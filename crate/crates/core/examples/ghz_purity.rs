//! Half-chain purity of a 4-qubit GHZ state from randomized measurements.
//!
//! The exact value is 1/2. The estimate should land within a few sigma.

use depolarize::qstate::{DensityMatrix, Statevector};
use depolarize::randmeas::{measure_purity, MeasurementPlan, Resampler};
use depolarize::C64;

fn main() -> depolarize::Result<()> {
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[15] = amps[0];
    let rho = DensityMatrix::from_pure(&Statevector::new(amps)?);

    for (n_u, n_m) in [(100, 512), (800, 512), (800, 4096)] {
        let plan = MeasurementPlan::new(n_u, n_m, vec![0, 1], 11)?;
        let jk = measure_purity(&rho, &plan, Resampler::Jackknife)?;
        let bs = measure_purity(
            &rho,
            &plan,
            Resampler::Bootstrap {
                samples: 200,
                seed: 3,
            },
        )?;
        println!(
            "N_u={n_u:>4} N_m={n_m:>4}: purity {:.4} +- {:.4} (bootstrap sigma {:.4})",
            jk.value, jk.sigma, bs.sigma
        );
    }
    println!("exact: {:.4}", rho.partial_trace(&[0, 1])?.purity());
    Ok(())
}
