//! Brick-wall generation network, its blocks B_q and the evolution matrix.

use dbsim::network::block;
use dbsim::{evolution_matrix, haar_unitary, random_network, RandomSeed};

fn main() -> dbsim::Result<()> {
    let (m, k) = (6, 3);
    let net = random_network(m, k, RandomSeed::new(11))?;
    for layer in net.layers() {
        let angles: Vec<String> = layer.angles.iter().map(|a| format!("{a:.3}")).collect();
        println!("layer {} ({:?}): [{}]", layer.index, layer.parity(), angles.join(", "));
    }
    for q in 1..=k {
        let b = block(&net, q)?;
        println!("B_{q}: unitarity residual {:.2e}", b.unitarity_residual());
    }
    let ev = evolution_matrix(&net, &haar_unitary(m, RandomSeed::new(12))?)?;
    println!("evolution matrix: {} x {}", ev.m(), ev.inputs());
    let (q, j) = ev.column_origin(8);
    println!("column 8 is layer {q}, mode {j}");
    println!("network document:\n{}", net.to_json()?);
    Ok(())
}
