//! Magnetization after a quench from the all-up state, with self-calibration
//! at short times and Trotter extrapolation of the error per step.

use depolarize::analysis::{run_quench, uniform_times, QuenchSpec};
use depolarize::circuits::TfimParams;
use depolarize::noise::NoiseModel;

fn main() -> depolarize::Result<()> {
    let params = TfimParams::new(7, 1.0, 0.5, 0.75)?;
    let mut spec = QuenchSpec::new(params, vec![], uniform_times(16, 3.0), vec![5, 6], 8192, 7);
    spec.extrapolate = true;
    let result = run_quench(&spec, &NoiseModel::depolarizing(5e-4, 5e-3)?)?;

    if let Some(fit) = &result.trotter {
        println!(
            "error per Trotter step {:.5} +- {:.5}",
            fit.p_step, fit.sigma_step
        );
    }
    for (steps, cal) in &result.direct {
        println!("N_T = {steps}: short-time p_tot {:.4}", cal.p_tot);
    }
    let s = &result.combined;
    let exact = s.exact.as_ref().expect("ED reference");
    println!("{:>6} {:>8} {:>9} {:>8}", "t", "raw", "mitigated", "ED");
    for i in 0..s.len() {
        println!(
            "{:6.2} {:8.4} {:9.4} {:8.4}",
            s.times[i], s.raw[i], s.mitigated[i], exact[i]
        );
    }
    println!(
        "L2 distance to ED: raw {:.4}, mitigated {:.4}",
        s.raw_distance().unwrap_or(f64::NAN),
        s.mitigated_distance().unwrap_or(f64::NAN)
    );
    Ok(())
}
