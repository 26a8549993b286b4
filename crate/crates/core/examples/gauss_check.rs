//! Entry statistics of small submatrices of a wide evolution matrix.

use dbsim::diagnostics::{null_model_reports, submatrix_element_test, InputSelection};
use dbsim::{evolution_matrix, haar_unitary, random_network, RandomSeed};

fn main() -> dbsim::Result<()> {
    let (m, k, n) = (256, 4, 3);
    let net = random_network(m, k, RandomSeed::new(1))?;
    let ev = evolution_matrix(&net, &haar_unitary(m, RandomSeed::new(2))?)?;
    for selection in [InputSelection::AnyBlock, InputSelection::SingleBlock] {
        println!("{selection:?}");
        for r in submatrix_element_test(&ev, n, 500, selection, RandomSeed::new(3))? {
            println!(
                "  {:15} D = {:.4}  p = {:.3}",
                r.component.to_string(),
                r.statistic,
                r.p_value
            );
        }
    }
    println!("i.i.d. Gaussian reference");
    for r in null_model_reports(4500, RandomSeed::new(4)) {
        println!(
            "  {:15} D = {:.4}  p = {:.3}",
            r.component.to_string(),
            r.statistic,
            r.p_value
        );
    }
    Ok(())
}
