//! Two photons on a balanced beam splitter never leave in different ports.

use dbsim::{evolution_matrix, full_distribution, ComplexAmplitudeMatrix, GenerationNetwork, OccupationVector};

fn main() -> dbsim::Result<()> {
    let net = GenerationNetwork::uniform(2, 1, std::f64::consts::FRAC_PI_4)?;
    let ev = evolution_matrix(&net, &ComplexAmplitudeMatrix::identity(2))?;
    let s_in = OccupationVector::new(vec![1, 1]);
    let dist = full_distribution(&ev, &s_in)?;
    for (outcome, p) in dist.entries() {
        println!("{outcome}: {p:.3e}");
    }
    Ok(())
}
