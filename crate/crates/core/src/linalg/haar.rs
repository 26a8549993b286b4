//! Haar-distributed unitaries via the Ginibre/QR construction.
//!
//! A complex Ginibre matrix is factored with Householder reflections. The
//! resulting `Q` is unitary but its distribution depends on the reflector
//! sign convention; multiplying column `j` by the phase of `R[j, j]` makes the
//! triangular factor's diagonal real positive, which pins down the unique QR
//! factorization and leaves `Q` exactly Haar distributed.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::ComplexAmplitudeMatrix;
use crate::error::{Error, Result};
use crate::rng::RandomSeed;

/// `rows × cols` matrix of i.i.d. standard complex Gaussians (`E|z|² = 1`).
pub fn ginibre<R: Rng + ?Sized>(rows: usize, cols: usize, rng: &mut R) -> ComplexAmplitudeMatrix {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let data = (0..rows * cols)
        .map(|_| {
            let re: f64 = rng.sample(StandardNormal);
            let im: f64 = rng.sample(StandardNormal);
            Complex64::new(s * re, s * im)
        })
        .collect();
    ComplexAmplitudeMatrix::new(rows, cols, data).expect("gaussian draws are finite")
}

pub fn haar_unitary(m: usize, seed: RandomSeed) -> Result<ComplexAmplitudeMatrix> {
    if m == 0 {
        return Err(Error::Dimension("Haar unitary needs m >= 1".into()));
    }
    let mut rng = seed.rng();
    let z = ginibre(m, m, &mut rng);
    Ok(phase_fixed_q(z))
}

/// Householder QR of a square matrix; returns `Q · diag(R_jj / |R_jj|)`.
fn phase_fixed_q(mut a: ComplexAmplitudeMatrix) -> ComplexAmplitudeMatrix {
    let m = a.rows();
    let zero = Complex64::new(0.0, 0.0);
    let mut reflectors: Vec<Option<Vec<Complex64>>> = Vec::with_capacity(m);
    let mut diag = Vec::with_capacity(m);

    for k in 0..m {
        let norm = (k..m).map(|i| a[(i, k)].norm_sqr()).sum::<f64>().sqrt();
        let x0 = a[(k, k)];
        if norm == 0.0 {
            reflectors.push(None);
            diag.push(zero);
            continue;
        }
        let phase = if x0.norm() == 0.0 {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * norm;
        let mut v: Vec<Complex64> = (k..m).map(|i| a[(i, k)]).collect();
        v[0] -= alpha;
        let vnorm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        for z in &mut v {
            *z /= vnorm;
        }
        // A[k.., k..] -= 2 v (v† A[k.., k..])
        for j in k..m {
            let dot: Complex64 = v.iter().enumerate().map(|(l, vl)| vl.conj() * a[(k + l, j)]).sum();
            for (l, vl) in v.iter().enumerate() {
                a[(k + l, j)] -= 2.0 * vl * dot;
            }
        }
        diag.push(alpha);
        reflectors.push(Some(v));
    }

    // Q = H_0 H_1 ... H_{m-1}, accumulated right to left onto the identity
    let mut q = ComplexAmplitudeMatrix::identity(m);
    for (k, v) in reflectors.iter().enumerate().rev() {
        let Some(v) = v else { continue };
        for j in 0..m {
            let dot: Complex64 = v.iter().enumerate().map(|(l, vl)| vl.conj() * q[(k + l, j)]).sum();
            if dot == zero {
                continue;
            }
            for (l, vl) in v.iter().enumerate() {
                q[(k + l, j)] -= 2.0 * vl * dot;
            }
        }
    }

    for (j, r) in diag.iter().enumerate() {
        if r.norm() > 0.0 {
            q.scale_column(j, r / r.norm());
        }
    }
    q
}
