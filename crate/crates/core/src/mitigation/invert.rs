use serde::{Deserialize, Serialize};

use super::uncertainty::{delta_expectation, delta_renyi};
use super::Calibration;
use crate::qstate::PauliObservable;
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigatedValue {
    pub value: f64,
    pub sigma: f64,
    pub calibration: Calibration,
    /// The inverted value left its physical range and was clamped.
    pub clamped: bool,
}

fn usable(cal: &Calibration) -> Result<()> {
    cal.validate()?;
    if cal.is_fully_depolarized() {
        return Err(Error::FullyDepolarized);
    }
    Ok(())
}

/// `(measured - p Tr[O]/2^n) / (1 - p)`.
pub fn mitigate_expectation(
    measured: f64,
    sigma_meas: f64,
    obs: &PauliObservable,
    cal: &Calibration,
) -> Result<MitigatedValue> {
    usable(cal)?;
    if obs.n() != cal.n {
        return Err(Error::Dimension {
            expected: cal.n,
            got: obs.n(),
        });
    }
    let p = cal.p_tot;
    let mixed = obs.mixed_value();
    let value = (measured - p * mixed) / (1.0 - p);
    let sigma = delta_expectation(sigma_meas, p, cal.sigma_p, measured, mixed)?;
    Ok(MitigatedValue {
        value,
        sigma,
        calibration: cal.clone(),
        clamped: false,
    })
}

/// Subsystem purity `T_A` of `(1 - p) rho + p I/2^n` in terms of the ideal
/// subsystem purity.
pub fn subsystem_purity_of_ptot(exact: f64, p: f64, n_a: usize) -> f64 {
    let d = 0.5f64.powi(n_a as i32);
    (1.0 - p).powi(2) * exact + 2.0 * d * p * (1.0 - p) + d * p * p
}

/// Ideal subsystem purity from a measured one, clamped to `[2^-nA, 1]`.
pub fn mitigate_subsystem_purity(
    t_a: f64,
    sigma: f64,
    n_a: usize,
    cal: &Calibration,
) -> Result<MitigatedValue> {
    usable(cal)?;
    if n_a == 0 || n_a > cal.n {
        return Err(Error::arg(format!(
            "subsystem size {n_a} outside 1..={}",
            cal.n
        )));
    }
    let p = cal.p_tot;
    let d = 0.5f64.powi(n_a as i32);
    let raw = (t_a - 2.0 * d * p * (1.0 - p) - d * p * p) / (1.0 - p).powi(2);
    let value = raw.clamp(d, 1.0);
    let sigma = delta_renyi(t_a, sigma, n_a, p, cal.sigma_p)?;
    Ok(MitigatedValue {
        value,
        sigma,
        calibration: cal.clone(),
        clamped: value != raw,
    })
}

/// Second-order Rényi entropy `-log2 Tr[rho_A^2]` of the mitigated subsystem
/// purity.
pub fn mitigate_renyi(
    t_a: f64,
    sigma: f64,
    n_a: usize,
    cal: &Calibration,
) -> Result<MitigatedValue> {
    let pur = mitigate_subsystem_purity(t_a, sigma, n_a, cal)?;
    Ok(MitigatedValue {
        value: -pur.value.log2(),
        sigma: pur.sigma / (pur.value * std::f64::consts::LN_2),
        ..pur
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mitigation::Method;
    use crate::noise::global_depolarize;
    use crate::qstate::{DensityMatrix, PauliString, Statevector};
    use crate::C64;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn cal(p: f64, n: usize) -> Calibration {
        Calibration::new(p, 0.0, Method::Purity, n).unwrap()
    }

    #[test]
    fn traceless_and_identity_examples() {
        let z = PauliObservable::z(2, 0);
        assert!(
            (mitigate_expectation(0.45, 0.0, &z, &cal(0.1, 2))
                .unwrap()
                .value
                - 0.5)
                .abs()
                < 1e-15
        );
        let id = PauliObservable::single(1.0, PauliString::identity(2));
        for p in [0.0, 0.4, 0.99] {
            assert!(
                (mitigate_expectation(1.0, 0.0, &id, &cal(p, 2))
                    .unwrap()
                    .value
                    - 1.0)
                    .abs()
                    < 1e-12
            );
        }
        assert!(matches!(
            mitigate_expectation(0.1, 0.0, &z, &cal(1.0, 2)),
            Err(Error::FullyDepolarized)
        ));
    }

    #[test]
    fn renyi_examples() {
        let m = mitigate_renyi(0.625, 0.0, 1, &cal(0.5, 3)).unwrap();
        assert!(m.value.abs() < 1e-12 && !m.clamped);
        let m = mitigate_renyi(0.4, 0.0, 2, &cal(0.0, 3)).unwrap();
        assert!((m.value + 0.4f64.log2()).abs() < 1e-15);
        assert!(mitigate_renyi(0.4, 0.0, 2, &cal(1.0, 3)).is_err());
    }

    fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
        let amps = (0..1 << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        Statevector::normalized(amps).unwrap()
    }

    fn random_string(n: usize, rng: &mut impl Rng) -> PauliString {
        let s: String = (0..n)
            .map(|_| ['I', 'X', 'Y', 'Z'][rng.random_range(0..4)])
            .collect();
        s.parse().unwrap()
    }

    #[test]
    fn round_trip_five_qubits() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let rho = DensityMatrix::from_pure(&random_state(5, &mut rng));
            let obs = PauliObservable::new(
                5,
                vec![
                    (0.7, random_string(5, &mut rng)),
                    (-1.3, random_string(5, &mut rng)),
                ],
            )
            .unwrap();
            let exact = rho.expectation(&obs).unwrap();
            let p = rng.random::<f64>() * 0.95;
            let measured = global_depolarize(&rho, p)
                .unwrap()
                .expectation(&obs)
                .unwrap();
            let m = mitigate_expectation(measured, 0.0, &obs, &cal(p, 5)).unwrap();
            assert!((m.value - exact).abs() < 1e-12);
        }
    }

    proptest! {
        #[test]
        fn mitigation_amplifies_traceless(measured in -1.0f64..1.0, p in 0.001f64..0.999) {
            let m = mitigate_expectation(measured, 0.0, &PauliObservable::z(3, 1), &cal(p, 3)).unwrap();
            prop_assert!(m.value.abs() >= measured.abs());
        }

        #[test]
        fn subsystem_round_trip(exact in 0.0f64..=1.0, p in 0.0f64..0.95, n_a in 1usize..=4) {
            let d = 0.5f64.powi(n_a as i32);
            let exact = d + (1.0 - d) * exact;
            let t = subsystem_purity_of_ptot(exact, p, n_a);
            let m = mitigate_subsystem_purity(t, 0.0, n_a, &cal(p, 6)).unwrap();
            prop_assert!((m.value - exact).abs() < 1e-12);
        }

        #[test]
        fn sigma_at_least_scaled_raw(s in 0.0f64..0.1, p in 0.0f64..0.9, sp in 0.0f64..0.05) {
            let c = Calibration::new(p, sp, Method::Purity, 2).unwrap();
            let m = mitigate_expectation(0.3, s, &PauliObservable::z(2, 0), &c).unwrap();
            prop_assert!(m.sigma >= s / (1.0 - p) - 1e-15);
        }
    }
}
