//! Dense complex matrices, permanents and Haar-random unitaries.

mod haar;
mod matrix;
mod permanent;

pub use haar::{ginibre, haar_unitary};
pub use matrix::{gram_matrix, ComplexAmplitudeMatrix};
pub use permanent::{permanent, permanent_naive, permanent_ryser, NAIVE_MAX_N, RYSER_MAX_N};

pub use num_complex::Complex64;

/// Tolerance for exact-algebra identities (unitarity of a single product, Gram matrices).
pub const EXACT_TOL: f64 = 1e-12;
/// Tolerance for exponential-sum kernels and long products.
pub const KERNEL_TOL: f64 = 1e-10;
