use rand::Rng;
use rayon::prelude::*;

use super::{MeasurementPlan, ShotRecord};
use crate::{Error, Result};

/// Resampling scheme for the uncertainty of the mean over unitaries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Resampler {
    #[default]
    Jackknife,
    Bootstrap {
        samples: usize,
        seed: u64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct PurityEstimate {
    pub value: f64,
    pub sigma: f64,
    pub plan: MeasurementPlan,
    /// Unbiased single-unitary estimates, in unitary order.
    pub per_unitary: Vec<f64>,
}

/// Applies `(⊗ [[1, -1/2], [-1/2, 1]]) v` in place.
fn hamming_kernel(v: &mut [f64], n_a: usize) {
    for q in 0..n_a {
        let bit = 1usize << q;
        for s in 0..v.len() {
            if s & bit == 0 {
                let (a, b) = (v[s], v[s | bit]);
                v[s] = a - 0.5 * b;
                v[s | bit] = b - 0.5 * a;
            }
        }
    }
}

/// `2^{n_A} sum (-2)^{-D} n_s (n_s' - [s=s']) / (N (N - 1))`.
fn single_unitary_estimate(counts: &[u64], n_a: usize) -> f64 {
    let shots: f64 = counts.iter().sum::<u64>() as f64;
    let v: Vec<f64> = counts.iter().map(|&c| c as f64).collect();
    let mut w = v.clone();
    hamming_kernel(&mut w, n_a);
    let quad: f64 = v.iter().zip(&w).map(|(a, b)| a * b).sum();
    (1u64 << n_a) as f64 * (quad - shots) / (shots * (shots - 1.0))
}

pub fn estimate_purity(records: &[ShotRecord], plan: &MeasurementPlan) -> Result<PurityEstimate> {
    estimate_purity_with(records, plan, Resampler::Jackknife)
}

pub fn estimate_purity_with(
    records: &[ShotRecord],
    plan: &MeasurementPlan,
    resampler: Resampler,
) -> Result<PurityEstimate> {
    plan.validate()?;
    if records.len() < 2 {
        return Err(Error::arg(format!(
            "need at least 2 unitaries, got {}",
            records.len()
        )));
    }
    let dim = 1usize << plan.n_a();
    let per_unitary: Vec<f64> = records
        .par_iter()
        .map(|r| {
            if r.counts.len() != dim {
                return Err(Error::Dimension {
                    expected: dim,
                    got: r.counts.len(),
                });
            }
            if r.total() < 2 {
                return Err(Error::arg(format!(
                    "unitary {} has fewer than 2 shots",
                    r.unitary_index
                )));
            }
            Ok(single_unitary_estimate(&r.counts, plan.n_a()))
        })
        .collect::<Result<_>>()?;
    let value = per_unitary.iter().sum::<f64>() / per_unitary.len() as f64;
    let sigma = match resampler {
        Resampler::Jackknife => jackknife_sigma(&per_unitary)?,
        Resampler::Bootstrap { samples, seed } => bootstrap_sigma(&per_unitary, samples, seed)?,
    };
    Ok(PurityEstimate {
        value,
        sigma,
        plan: plan.clone(),
        per_unitary,
    })
}

/// Leave-one-out jackknife standard error of the mean.
pub fn jackknife_sigma(values: &[f64]) -> Result<f64> {
    let n = values.len();
    if n < 2 {
        return Err(Error::arg("jackknife needs at least 2 values"));
    }
    let total: f64 = values.iter().sum();
    let loo: Vec<f64> = values
        .iter()
        .map(|v| (total - v) / (n - 1) as f64)
        .collect();
    let mean = loo.iter().sum::<f64>() / n as f64;
    let ss: f64 = loo.iter().map(|x| (x - mean).powi(2)).sum();
    Ok(((n - 1) as f64 / n as f64 * ss).sqrt())
}

/// Bootstrap standard error of the mean with `samples` resamples.
pub fn bootstrap_sigma(values: &[f64], samples: usize, seed: u64) -> Result<f64> {
    use rand::SeedableRng;
    let n = values.len();
    if n < 2 || samples < 2 {
        return Err(Error::arg(
            "bootstrap needs at least 2 values and 2 resamples",
        ));
    }
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let means: Vec<f64> = (0..samples)
        .map(|_| (0..n).map(|_| values[rng.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    let m = means.iter().sum::<f64>() / samples as f64;
    Ok((means.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (samples - 1) as f64).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::{DensityMatrix, Statevector};
    use crate::randmeas::{sample_local_random_unitaries, simulate_shots};
    use crate::C64;
    use rand::SeedableRng;
    use rand_distr::{Distribution, Normal};

    fn run(rho: &DensityMatrix, plan: &MeasurementPlan) -> PurityEstimate {
        let us = sample_local_random_unitaries(plan).unwrap();
        let recs = simulate_shots(rho, &us, plan).unwrap();
        estimate_purity(&recs, plan).unwrap()
    }

    /// Brute-force double sum over outcome pairs.
    fn brute_single(counts: &[u64], n_a: usize) -> f64 {
        let n: f64 = counts.iter().sum::<u64>() as f64;
        let mut acc = 0.0;
        for (s, &a) in counts.iter().enumerate() {
            for (t, &b) in counts.iter().enumerate() {
                let d = (s ^ t).count_ones() as i32;
                let pair = if s == t {
                    a as f64 * (a as f64 - 1.0)
                } else {
                    a as f64 * b as f64
                };
                acc += (-2.0f64).powi(-d) * pair;
            }
        }
        (1 << n_a) as f64 * acc / (n * (n - 1.0))
    }

    #[test]
    fn kernel_matches_double_sum() {
        let counts = [5u64, 0, 3, 9, 1, 1, 0, 7];
        assert!((single_unitary_estimate(&counts, 3) - brute_single(&counts, 3)).abs() < 1e-12);
    }

    #[test]
    fn pure_and_mixed_single_qubit() {
        let plan = MeasurementPlan::new(200, 512, vec![0], 21).unwrap();
        let e = run(&DensityMatrix::basis(1, 0).unwrap(), &plan);
        assert!(
            (e.value - 1.0).abs() < 3.0 * e.sigma,
            "{} ± {}",
            e.value,
            e.sigma
        );
        let e = run(&DensityMatrix::maximally_mixed(1), &plan);
        assert!(
            (e.value - 0.5).abs() < 3.0 * e.sigma,
            "{} ± {}",
            e.value,
            e.sigma
        );
    }

    #[test]
    fn invariant_under_record_permutation() {
        let plan = MeasurementPlan::new(30, 64, vec![0, 1], 2).unwrap();
        let us = sample_local_random_unitaries(&plan).unwrap();
        let rho = DensityMatrix::maximally_mixed(2);
        let mut recs = simulate_shots(&rho, &us, &plan).unwrap();
        let a = estimate_purity(&recs, &plan).unwrap();
        recs.reverse();
        recs.swap(3, 17);
        let b = estimate_purity(&recs, &plan).unwrap();
        assert!((a.value - b.value).abs() < 1e-12 && (a.sigma - b.sigma).abs() < 1e-12);
    }

    #[test]
    fn too_few_inputs() {
        let plan = MeasurementPlan::new(2, 2, vec![0], 0).unwrap();
        let one = vec![ShotRecord {
            unitary_index: 0,
            counts: vec![2, 0],
        }];
        assert!(estimate_purity(&one, &plan).is_err());
        let thin = vec![
            ShotRecord {
                unitary_index: 0,
                counts: vec![1, 0]
            };
            2
        ];
        assert!(estimate_purity(&thin, &plan).is_err());
        assert!(MeasurementPlan::new(1, 10, vec![0], 0).is_err());
        assert!(MeasurementPlan::new(10, 1, vec![0], 0).is_err());
        assert!(MeasurementPlan::new(10, 10, vec![], 0).is_err());
    }

    #[test]
    fn jackknife_closed_forms() {
        assert_eq!(jackknife_sigma(&[0.3; 9]).unwrap(), 0.0);
        assert!((jackknife_sigma(&[1.0, 4.0]).unwrap() - 1.5).abs() < 1e-15);
        assert!(jackknife_sigma(&[1.0]).is_err());
    }

    #[test]
    fn jackknife_matches_standard_error() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(4);
        let normal = Normal::new(2.0, 0.7).unwrap();
        let xs: Vec<f64> = (0..100).map(|_| normal.sample(&mut rng)).collect();
        let mean = xs.iter().sum::<f64>() / 100.0;
        let sem = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / 99.0 / 100.0).sqrt();
        let jk = jackknife_sigma(&xs).unwrap();
        assert!((jk / sem - 1.0).abs() < 0.2);
        // and the population value 0.07 within 20%
        assert!((jk / 0.07 - 1.0).abs() < 0.2, "{jk}");
        let bs = bootstrap_sigma(&xs, 2000, 1).unwrap();
        assert!((bs / sem - 1.0).abs() < 0.2);
    }

    #[test]
    fn unbiased_on_mixed_three_qubit_state() {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let mut amps = vec![C64::new(0.0, 0.0); 8];
        amps[0] = C64::new(h, 0.0);
        amps[7] = C64::new(0.0, h);
        let rho = DensityMatrix::from_pure(&Statevector::new(amps).unwrap())
            .mix(&DensityMatrix::maximally_mixed(3), 0.35)
            .unwrap();
        let exact = rho.purity();
        let runs: Vec<PurityEstimate> = (0..200)
            .into_par_iter()
            .map(|seed| {
                run(
                    &rho,
                    &MeasurementPlan::new(20, 16, vec![0, 1, 2], seed).unwrap(),
                )
            })
            .collect();
        let mean = runs.iter().map(|e| e.value).sum::<f64>() / 200.0;
        let combined = (runs.iter().map(|e| e.sigma.powi(2)).sum::<f64>()).sqrt() / 200.0;
        assert!(
            (mean - exact).abs() < 2.0 * combined,
            "mean {mean} exact {exact} se {combined}"
        );
    }

    #[test]
    fn error_scales_as_inverse_sqrt_unitaries() {
        let rho = DensityMatrix::maximally_mixed(2)
            .mix(&DensityMatrix::basis(2, 0).unwrap(), 0.5)
            .unwrap();
        let nus = [50usize, 100, 200, 400, 800];
        let pts: Vec<(f64, f64)> = nus
            .iter()
            .map(|&nu| {
                // average sigma over seeds to tame fluctuations
                let s: f64 = (0..8u64)
                    .map(|seed| {
                        run(
                            &rho,
                            &MeasurementPlan::new(nu, 64, vec![0, 1], seed).unwrap(),
                        )
                        .sigma
                    })
                    .sum::<f64>()
                    / 8.0;
                ((nu as f64).ln(), s.ln())
            })
            .collect();
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / 5.0;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / 5.0;
        let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
            / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
        assert!((slope + 0.5).abs() < 0.15, "slope {slope}");
    }
}
