//! Ryser permanents against the naive expansion, plus the Gram identity.

use dbsim::linalg::{gram_matrix, haar_unitary, permanent_naive, permanent_ryser, Complex64};
use dbsim::{ComplexAmplitudeMatrix, RandomSeed};

fn main() -> dbsim::Result<()> {
    let ones = ComplexAmplitudeMatrix::from_real(3, 3, &[1.0; 9])?;
    println!("Per(J_3) = {} (3! = 6)", permanent_ryser(&ones)?.re);

    let u = haar_unitary(6, RandomSeed::new(7))?;
    let ryser = permanent_ryser(&u)?;
    let naive = permanent_naive(&u)?;
    println!(
        "6x6 Haar unitary: Ryser {ryser:.12}, naive {naive:.12}, |diff| {:.2e}",
        (ryser - naive).norm()
    );

    let v = u.select(&[0, 1, 2, 3, 4, 5], &[0, 2])?;
    let g = gram_matrix(&v);
    println!(
        "Per(V^dag V) for two orthonormal columns = {:.12}",
        permanent_ryser(&g)?
    );

    let big = haar_unitary(20, RandomSeed::new(1))?;
    let t = std::time::Instant::now();
    let p: Complex64 = permanent_ryser(&big)?;
    println!("20x20 permanent {p:.6e} in {:?}", t.elapsed());
    Ok(())
}
