//! Shot-level simulation of the heralded sources compared with closed forms.

use dbsim::montecarlo::{simulate_trials, Concordance, DetectorModel, MonteCarloOptions};
use dbsim::source::optimal_source;
use dbsim::{RandomSeed, SchemeParams};

fn main() -> dbsim::Result<()> {
    let p = SchemeParams::dbs(2, 4, 2)?;
    let src = optimal_source(&p);
    for detector in [DetectorModel::Threshold, DetectorModel::NumberResolving] {
        let opts = MonteCarloOptions::new(1_000_000, RandomSeed::new(2024)).detector(detector);
        let s = simulate_trials(&p, &src, &opts)?;
        let c = Concordance::of(&s);
        println!("{detector:?}: valid {} noisy {} clean {}", s.valid, s.noisy, s.clean);
        println!(
            "  P_s    {:.5} +- {:.5} (closed form {:.5}, z = {:+.2})",
            s.p_s, s.p_s_err, c.p_s_analytic, c.p_s_z
        );
        if let (Some(snr), Some(z)) = (s.snr, c.snr_z) {
            println!("  SNR    {snr:.4} (closed form {:.4}, z = {z:+.2})", c.snr_analytic);
        }
    }
    Ok(())
}
