use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use super::MeasurementPlan;
use crate::qstate::Matrix;
use crate::{Result, C64};

/// Haar-random element of U(2): a uniform point on the 3-sphere gives an
/// SU(2) element, multiplied by a uniform global phase.
pub fn haar_unitary<R: Rng + ?Sized>(rng: &mut R) -> Matrix {
    let mut v = [0.0f64; 4];
    let norm = loop {
        v.iter_mut().for_each(|x| *x = rng.sample(StandardNormal));
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-12 {
            break norm;
        }
    };
    let a = C64::new(v[0], v[1]) / norm;
    let b = C64::new(v[2], v[3]) / norm;
    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
    Matrix::from_row_slice(
        2,
        2,
        &[a * phase, -b.conj() * phase, b * phase, a.conj() * phase],
    )
}

/// `N_u` tuples of independent Haar unitaries, one per subsystem qubit.
pub fn sample_local_random_unitaries(plan: &MeasurementPlan) -> Result<Vec<Vec<Matrix>>> {
    plan.validate()?;
    Ok((0..plan.n_u)
        .into_par_iter()
        .map(|u| {
            let mut rng = plan.rng(2 * u as u64);
            (0..plan.n_a()).map(|_| haar_unitary(&mut rng)).collect()
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::qstate::check_unitary;

    #[test]
    fn deterministic_under_seed() {
        let plan = MeasurementPlan::new(20, 10, vec![0, 2], 99).unwrap();
        let a = sample_local_random_unitaries(&plan).unwrap();
        let b = sample_local_random_unitaries(&plan).unwrap();
        assert_eq!(a, b);
        let other = MeasurementPlan { seed: 100, ..plan };
        assert_ne!(a, sample_local_random_unitaries(&other).unwrap());
    }

    #[test]
    fn samples_are_unitary() {
        let plan = MeasurementPlan::new(50, 2, vec![0, 1, 2], 1).unwrap();
        for tuple in sample_local_random_unitaries(&plan).unwrap() {
            for u in tuple {
                check_unitary(&u).unwrap();
            }
        }
    }

    #[test]
    fn haar_second_moment() {
        // E|u00|^2 = 1/2, E|u00|^4 = 1/3 for Haar U(2)
        let plan = MeasurementPlan::new(10_000, 2, vec![0], 7).unwrap();
        let us = sample_local_random_unitaries(&plan).unwrap();
        let m2: f64 = us.iter().map(|t| t[0][(0, 0)].norm_sqr()).sum::<f64>() / us.len() as f64;
        let m4: f64 = us
            .iter()
            .map(|t| t[0][(0, 0)].norm_sqr().powi(2))
            .sum::<f64>()
            / us.len() as f64;
        assert!((m2 - 0.5).abs() < 0.02, "{m2}");
        assert!((m4 - 1.0 / 3.0).abs() < 0.02, "{m4}");
    }
}
