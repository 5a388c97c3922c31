//! Meson masses from the dominant oscillation of the middle-site
//! magnetization, compared with exact energy gaps.

use depolarize::analysis::{run_meson_masses, uniform_times, MesonConfig, QuenchSpec};
use depolarize::circuits::{ed_energy_gaps, TfimParams};
use depolarize::noise::NoiseModel;

fn main() -> depolarize::Result<()> {
    let noise = NoiseModel::depolarizing(5e-4, 5e-3)?;
    let states = vec![vec![], vec![3]];
    for hz in [0.5, 1.0] {
        let params = TfimParams::new(7, 1.0, 0.75, hz)?;
        let mut quench = QuenchSpec::new(
            params,
            vec![],
            uniform_times(36, 3.5),
            vec![12, 14],
            8192,
            1,
        );
        quench.extrapolate = true;
        let cfg = MesonConfig {
            quench,
            mitigate: true,
        };
        let gaps = ed_energy_gaps(&params, 3)?;
        println!("hz = {hz}: lowest gaps {gaps:.4?}");
        for run in run_meson_masses(&params, &states, &cfg, &noise)? {
            let r = &run.report;
            println!(
                "  {}: omega {:.4} +- {:.4} (raw {:.4}), ED line {:.4} levels {:?}, deviation {:.2}% {:?}",
                r.label,
                r.omega,
                r.omega_sigma,
                r.raw_omega,
                r.ed_gap,
                r.ed_levels,
                100.0 * r.deviation,
                r.flags
            );
        }
    }
    Ok(())
}
