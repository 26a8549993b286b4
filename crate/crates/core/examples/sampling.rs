//! Exact output distribution for photons injected across several layers,
//! then shots drawn from it.

use std::collections::BTreeMap;

use dbsim::{evolution_matrix, full_distribution, haar_unitary, random_network, OccupationVector, RandomSeed};

fn main() -> dbsim::Result<()> {
    let (m, k) = (4, 3);
    let net = random_network(m, k, RandomSeed::new(3))?;
    let ev = evolution_matrix(&net, &haar_unitary(m, RandomSeed::new(4))?)?;

    // One photon in layer 1 mode 0, one in layer 2 mode 1, one in layer 3 mode 3.
    let cols = [ev.column_index(1, 0), ev.column_index(2, 1), ev.column_index(3, 3)];
    let s_in = OccupationVector::from_modes(ev.inputs(), &cols)?;
    let dist = full_distribution(&ev, &s_in)?;
    println!("{} outcomes, normalizer N = {:.6}", dist.len(), dist.normalizer());

    let shots = dist.sample(20_000, RandomSeed::new(5));
    let mut counts: BTreeMap<String, usize> = BTreeMap::new();
    for s in &shots {
        *counts.entry(s.to_string()).or_default() += 1;
    }
    println!("outcome   exact     empirical");
    for (o, p) in dist.entries().iter().take(8) {
        let f = counts.get(&o.to_string()).copied().unwrap_or(0) as f64 / shots.len() as f64;
        println!("{o}  {p:.5}   {f:.5}");
    }
    Ok(())
}
