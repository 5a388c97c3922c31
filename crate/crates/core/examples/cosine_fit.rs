//! Damped-cosine fit of a noisy synthetic oscillation.

use depolarize::analysis::{fit_with_seed, frequency_seed, CosineParams};
use rand::SeedableRng;
use rand_distr::{Distribution, Normal};

fn main() -> depolarize::Result<()> {
    let truth = CosineParams {
        a: 0.6,
        d: 0.15,
        omega: 2.7,
        c1: 0.02,
        c2: -0.1,
    };
    let times: Vec<f64> = (0..40).map(|i| 6.0 * i as f64 / 39.0).collect();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
    let noise = Normal::new(0.0, 0.02).expect("valid sigma");
    let values: Vec<f64> = times
        .iter()
        .map(|&t| truth.eval(t) + noise.sample(&mut rng))
        .collect();
    let sigmas = vec![0.02; times.len()];

    let seed = frequency_seed(&times, &values)?;
    println!("periodogram seed omega {:.3}", seed.omega);
    let fit = fit_with_seed(&times, &values, Some(&sigmas))?;
    let p = fit.params;
    println!(
        "truth  A={:.3} d={:.3} omega={:.3} c1={:.3} c2={:.3}",
        truth.a, truth.d, truth.omega, truth.c1, truth.c2
    );
    println!(
        "fit    A={:.3} d={:.3} omega={:.3} c1={:.3} c2={:.3}",
        p.a, p.d, p.omega, p.c1, p.c2
    );
    println!(
        "omega sigma {:.4}, {} iterations, converged {}",
        fit.omega_sigma(),
        fit.iterations,
        fit.converged
    );
    Ok(())
}
