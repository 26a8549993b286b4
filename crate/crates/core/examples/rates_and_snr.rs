//! Success probability, optimal squeezing and heralding SNR for scattershot
//! and driven sampling with m = n^2 modes.

use dbsim::source::{lambda_opt, max_success_probability, min_layers_for_unit_snr, min_modes_for_unit_snr, snr};
use dbsim::SchemeParams;

fn main() -> dbsim::Result<()> {
    println!("  n  lambda_SBS  lambda_DBS     P_SBS        P_DBS     ratio   SNR_SBS  SNR_DBS");
    for n in [2, 4, 6, 10, 20, 50, 100] {
        let sbs = SchemeParams::sbs_square(n)?;
        let dbs = SchemeParams::dbs_square(n)?;
        let (ps, pd) = (max_success_probability(&sbs), max_success_probability(&dbs));
        println!(
            "{n:3}  {:.6}    {:.6}    {ps:.4e}  {pd:.4e}  {:.4}  {:.4}   {:.4}",
            lambda_opt(&sbs),
            lambda_opt(&dbs),
            pd / ps,
            snr(&sbs),
            snr(&dbs)
        );
    }
    println!(
        "unit SNR needs m >= {:.4} modes or k >= {:.4} layers at n = 2",
        min_modes_for_unit_snr(2),
        min_layers_for_unit_snr(2)
    );
    Ok(())
}
