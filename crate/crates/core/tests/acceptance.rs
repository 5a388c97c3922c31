//! Acceptance checks. Each prints one PASS/FAIL line followed by details.
//!
//! Run with `cargo test --release --test acceptance`.

use std::path::PathBuf;
use std::time::Instant;

use depolarize::analysis::{fit_with_seed, CosineParams};
use depolarize::experiments::{brickwork_bench, masses, quench, renyi, RunConfig};
use depolarize::mitigation::{
    delta_ptot, mitigate_expectation, purity_of_ptot, solve_ptot_from_purity,
    subsystem_purity_of_ptot, Calibration, Method, SigmaMode,
};
use depolarize::noise::global_depolarize;
use depolarize::qstate::{DensityMatrix, Pauli, PauliObservable, PauliString, Statevector};
use depolarize::randmeas::{measure_purity, MeasurementPlan, Resampler};
use depolarize::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

struct Check {
    id: usize,
    name: &'static str,
    pass: bool,
    details: Vec<String>,
}

fn config(name: &str) -> RunConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("configs")
        .join(name);
    RunConfig::load(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

fn random_state(n: usize, rng: &mut impl Rng) -> Statevector {
    let normal = Normal::new(0.0, 1.0).unwrap();
    let amps = (0..1usize << n)
        .map(|_| C64::new(normal.sample(rng), normal.sample(rng)))
        .collect();
    Statevector::normalized(amps).unwrap()
}

fn random_observable(n: usize, rng: &mut impl Rng) -> PauliObservable {
    let all = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];
    let terms = (0..rng.random_range(1..=4))
        .map(|_| {
            let ps: Vec<Pauli> = (0..n).map(|_| all[rng.random_range(0..4)]).collect();
            (
                rng.random_range(-1.0..1.0),
                PauliString::from_paulis(&ps).unwrap(),
            )
        })
        .collect();
    PauliObservable::new(n, terms).unwrap()
}

fn ansatz_round_trip() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let ps: Vec<f64> = (1..=18).map(|k| 0.05 * k as f64).collect();
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let n = rng.random_range(1..=6);
        let psi = random_state(n, &mut rng);
        let obs = random_observable(n, &mut rng);
        let exact = psi.expectation(&obs).unwrap();
        let rho = DensityMatrix::from_pure(&psi);
        for &p in &ps {
            let measured = global_depolarize(&rho, p)
                .unwrap()
                .expectation(&obs)
                .unwrap();
            let cal = Calibration::new(p, 0.0, Method::Purity, n).unwrap();
            let v = mitigate_expectation(measured, 0.0, &obs, &cal)
                .unwrap()
                .value;
            worst = worst.max((v - exact).abs());
        }
    }
    Check {
        id: 1,
        name: "ansatz round trip",
        pass: worst <= 1e-10,
        details: vec![format!(
            "200 states x {} p values, max error {worst:.2e}",
            ps.len()
        )],
    }
}

fn purity_inversion() -> Check {
    let mut worst = 0.0f64;
    for n in 1..=8 {
        for k in 0..1000 {
            let p = k as f64 / 999.0;
            let got = solve_ptot_from_purity(purity_of_ptot(p, n), n)
                .unwrap()
                .p_tot;
            worst = worst.max((got - p).abs());
        }
    }
    Check {
        id: 2,
        name: "purity inversion",
        pass: worst <= 1e-9,
        details: vec![format!("1000-point grid, n = 1..8, max error {worst:.2e}")],
    }
}

fn subsystem_purity() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    let mut cases = 0;
    for _ in 0..20 {
        let psi = random_state(6, &mut rng);
        let rho = DensityMatrix::from_pure(&psi);
        let p = rng.random_range(0.0..1.0);
        let noisy = global_depolarize(&rho, p).unwrap();
        for n_a in 1..=3 {
            let mut keep: Vec<usize> = (0..6).collect();
            for i in (1..6).rev() {
                keep.swap(i, rng.random_range(0..=i));
            }
            keep.truncate(n_a);
            keep.sort_unstable();
            for sub in [(0..n_a).collect::<Vec<_>>(), keep] {
                let exact = rho.partial_trace(&sub).unwrap().purity();
                let got = noisy.partial_trace(&sub).unwrap().purity();
                worst = worst.max((got - subsystem_purity_of_ptot(exact, p, n_a)).abs());
                cases += 1;
            }
        }
    }
    Check {
        id: 3,
        name: "subsystem purity formula",
        pass: worst <= 1e-12,
        details: vec![format!(
            "{cases} (state, subsystem) cases, max error {worst:.2e}"
        )],
    }
}

fn ghz_purity() -> Check {
    let mut amps = vec![C64::new(0.0, 0.0); 16];
    amps[0] = C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    amps[15] = amps[0];
    let rho = DensityMatrix::from_pure(&Statevector::new(amps).unwrap());
    let plan = MeasurementPlan::new(800, 512, vec![0, 1], 4).unwrap();
    let e = measure_purity(&rho, &plan, Resampler::Jackknife).unwrap();
    let z = (e.value - 0.5).abs() / e.sigma;
    Check {
        id: 4,
        name: "randomized-measurement purity",
        pass: z <= 3.0 && (1e-3..1e-1).contains(&e.sigma),
        details: vec![format!(
            "GHZ half-chain purity {:.4} +- {:.4} (exact 0.5, {z:.2} sigma)",
            e.value, e.sigma
        )],
    }
}

fn renyi_quench() -> Check {
    let mut pass = true;
    let mut details = Vec::new();
    for hz in [0.0, 0.5] {
        let mut cfg = config("renyi.toml");
        cfg.tfim.as_mut().unwrap().hz = hz;
        let (_, points, _) = renyi(&cfg).unwrap();
        let l2 = |f: fn(&depolarize::experiments::RenyiPoint) -> f64| {
            points
                .iter()
                .map(|p| (f(p) - p.exact).powi(2))
                .sum::<f64>()
                .sqrt()
        };
        let (raw, mit) = (l2(|p| p.raw), l2(|p| p.mitigated));
        let worst = points
            .iter()
            .map(|p| (p.mitigated - p.exact).abs() / p.mitigated_sigma)
            .fold(0.0, f64::max);
        pass &= worst <= 2.0 && mit < raw;
        details.push(format!(
            "hz={hz}: L2 raw {raw:.4}, mitigated {mit:.4}; worst point {worst:.2} sigma"
        ));
    }
    Check {
        id: 5,
        name: "Renyi quench",
        pass,
        details,
    }
}

fn magnetization_quench() -> Check {
    let mut pass = true;
    let mut details = Vec::new();
    for seed in 1..=3 {
        let mut cfg = config("quench.toml");
        cfg.seed = seed;
        let (_, result) = quench(&cfg).unwrap();
        let raw = result.combined.raw_distance().unwrap();
        let mit = result.combined.mitigated_distance().unwrap();
        pass &= mit < raw;
        details.push(format!("seed {seed}: L2 raw {raw:.4}, mitigated {mit:.4}"));
    }
    Check {
        id: 6,
        name: "magnetization quench",
        pass,
        details,
    }
}

fn meson_masses() -> Check {
    let cfg = config("masses.toml");
    let per_field = cfg.masses.as_ref().unwrap().initial_states.len();
    let runs = masses(&cfg).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for (i, run) in runs.iter().enumerate() {
        let r = &run.report;
        let first = i % per_field == 0;
        if first {
            pass &= r.deviation < 0.05;
        }
        details.push(format!(
            "hz={} {}: omega {:.4} vs ED {:.4}, deviation {:.2}%{}{}",
            r.hz,
            r.label,
            r.omega,
            r.ed_gap,
            100.0 * r.deviation,
            if first { " (first mass)" } else { "" },
            if r.flags.is_empty() {
                String::new()
            } else {
                format!(" [{}]", r.flags.join(", "))
            }
        ));
    }
    Check {
        id: 7,
        name: "meson masses",
        pass,
        details,
    }
}

fn brickwork() -> Check {
    let cfg = config("brickwork_bench.toml");
    let (_, summaries) = brickwork_bench(&cfg).unwrap();
    let mut pass = true;
    let mut details = Vec::new();
    for s in &summaries {
        let trace_ok = s.rms_trace < s.rms_raw;
        let single_ok = !s.single_flag.is_empty() || s.rms_single < s.rms_raw;
        pass &= trace_ok && single_ok;
        details.push(format!(
            "{} (n={}): rms raw {:.4}, trace {:.4}{}, single {:.4}{}{}",
            s.operator,
            s.n,
            s.rms_raw,
            s.rms_trace,
            if trace_ok { "" } else { " (not improved)" },
            s.rms_single,
            if s.single_flag.is_empty() {
                String::new()
            } else {
                format!(" [{}]", s.single_flag)
            },
            if single_ok {
                ""
            } else {
                " (not improved, not flagged)"
            }
        ));
    }
    Check {
        id: 8,
        name: "brickwork benchmark",
        pass,
        details,
    }
}

fn uncertainty_propagation() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let draws = 20_000;
    let mut worst = 0.0f64;
    let mut printed_worst = 0.0f64;
    let mut printed_best = f64::INFINITY;
    for n in 1..=8 {
        for p in [0.1, 0.2, 0.3, 0.4, 0.5] {
            let t = purity_of_ptot(p, n);
            for sigma_t in [0.005, 0.01, 0.02] {
                let normal = Normal::new(t, sigma_t).unwrap();
                let samples: Vec<f64> = (0..draws)
                    .map(|_| {
                        solve_ptot_from_purity(normal.sample(&mut rng), n)
                            .unwrap()
                            .p_tot
                    })
                    .collect();
                let mean = samples.iter().sum::<f64>() / draws as f64;
                let var =
                    samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (draws - 1) as f64;
                let mc = var.sqrt();
                let implicit = delta_ptot(p, sigma_t, n, t, SigmaMode::Implicit).unwrap();
                let printed = delta_ptot(p, sigma_t, n, t, SigmaMode::Printed).unwrap();
                worst = worst.max((implicit / mc - 1.0).abs());
                printed_worst = printed_worst.max(printed / mc);
                printed_best = printed_best.min(printed / mc);
            }
        }
    }
    Check {
        id: 9,
        name: "uncertainty propagation",
        pass: worst <= 0.10,
        details: vec![
            format!("implicit vs Monte-Carlo: worst relative deviation {:.2}%", 100.0 * worst),
            format!(
                "printed alternative / Monte-Carlo ratio ranges over [{printed_best:.3e}, {printed_worst:.3e}]"
            ),
        ],
    }
}

fn cosine_fitter() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let times: Vec<f64> = (0..40).map(|i| 6.0 * i as f64 / 39.0).collect();
    let noise = Normal::new(0.0, 0.02).unwrap();
    let mut details = Vec::new();
    let mut pass = true;
    let draws: Vec<CosineParams> = (0..20)
        .map(|_| CosineParams {
            a: rng.random_range(0.3..1.0),
            d: rng.random_range(0.0..0.3),
            omega: rng.random_range(1.0..4.0),
            c1: rng.random_range(-0.05..0.05),
            c2: rng.random_range(-0.2..0.2),
        })
        .collect();
    for noisy in [false, true] {
        let mut good = 0;
        let mut worst = 0.0f64;
        for truth in &draws {
            let values: Vec<f64> = times
                .iter()
                .map(|&t| truth.eval(t) + if noisy { noise.sample(&mut rng) } else { 0.0 })
                .collect();
            let sig = vec![0.02; times.len()];
            let fit = fit_with_seed(&times, &values, noisy.then_some(&sig[..])).unwrap();
            let rel = (fit.params.omega - truth.omega).abs() / truth.omega;
            worst = worst.max(rel);
            good += usize::from(rel < 0.03);
        }
        pass &= good * 100 >= 95 * draws.len();
        details.push(format!(
            "{}: {good}/{} within 3%, worst {:.2}%",
            if noisy {
                "sigma=0.02 noise"
            } else {
                "noiseless"
            },
            draws.len(),
            100.0 * worst
        ));
    }
    Check {
        id: 10,
        name: "cosine fitter",
        pass,
        details,
    }
}

fn main() {
    let checks: [fn() -> Check; 10] = [
        ansatz_round_trip,
        purity_inversion,
        subsystem_purity,
        ghz_purity,
        renyi_quench,
        magnetization_quench,
        meson_masses,
        brickwork,
        uncertainty_propagation,
        cosine_fitter,
    ];
    let mut passed = 0;
    for f in checks {
        let start = Instant::now();
        let c = f();
        let secs = start.elapsed().as_secs_f64();
        println!(
            "{} criterion {:>2} {} ({secs:.1} s)",
            if c.pass { "PASS" } else { "FAIL" },
            c.id,
            c.name
        );
        for d in &c.details {
            println!("     {d}");
        }
        passed += usize::from(c.pass);
    }
    println!("acceptance: {passed}/{} criteria passed", checks.len());
}
