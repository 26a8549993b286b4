//! Matrix permanents.
//!
//! [`permanent_ryser`] is the production kernel: Ryser's inclusion-exclusion
//! formula walked in Gray-code order so that each subset differs from its
//! predecessor by one column and the row sums update in `O(n)`. The subset
//! range is cut into fixed-size chunks that depend only on `n`; partial sums
//! are combined in chunk order, so the result is bitwise identical for any
//! number of rayon workers.
//!
//! [`permanent_naive`] sums over all `n!` permutations and exists as an
//! independent check of the fast kernel.

use num_complex::Complex64;
use rayon::prelude::*;

use super::ComplexAmplitudeMatrix;
use crate::error::{Error, Result};

pub const RYSER_MAX_N: usize = 30;
pub const NAIVE_MAX_N: usize = 10;

/// Gray-code steps handled by one work item.
const CHUNK_BITS: u32 = 14;

fn check_square(a: &ComplexAmplitudeMatrix) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "permanent needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    Ok(a.rows())
}

/// Permanent of a square matrix, `Per(∅) = 1`.
pub fn permanent(a: &ComplexAmplitudeMatrix) -> Result<Complex64> {
    permanent_ryser(a)
}

pub fn permanent_ryser(a: &ComplexAmplitudeMatrix) -> Result<Complex64> {
    let n = check_square(a)?;
    match n {
        0 => return Ok(Complex64::new(1.0, 0.0)),
        1 => return Ok(a[(0, 0)]),
        2 => return Ok(a[(0, 0)] * a[(1, 1)] + a[(0, 1)] * a[(1, 0)]),
        _ if n > RYSER_MAX_N => {
            return Err(Error::SizeLimit(format!(
                "permanent of {n}x{n} exceeds the {RYSER_MAX_N}x{RYSER_MAX_N} limit"
            )))
        }
        _ => {}
    }

    // column-major copy so a Gray-code step touches contiguous memory
    let columns: Vec<Vec<Complex64>> = (0..n).map(|j| a.column(j)).collect();
    let total: u64 = 1 << n;
    let chunk: u64 = 1 << CHUNK_BITS;
    let n_chunks = total.div_ceil(chunk);

    let partial = |c: u64| {
        let start = (c * chunk).max(1);
        let end = ((c + 1) * chunk).min(total);
        ryser_range(&columns, start, end)
    };

    let sum: Complex64 = if n_chunks == 1 {
        partial(0)
    } else {
        let parts: Vec<Complex64> = (0..n_chunks).into_par_iter().map(partial).collect();
        parts.into_iter().sum()
    };

    Ok(if n % 2 == 0 { sum } else { -sum })
}

/// Signed sum of row-sum products for Gray-code indices `start..end` (`start ≥ 1`).
fn ryser_range(columns: &[Vec<Complex64>], start: u64, end: u64) -> Complex64 {
    let n = columns.len();
    let gray = |t: u64| t ^ (t >> 1);

    let mut row_sums = vec![Complex64::new(0.0, 0.0); n];
    let mut subset = gray(start - 1);
    for (j, col) in columns.iter().enumerate() {
        if subset >> j & 1 == 1 {
            for (s, &x) in row_sums.iter_mut().zip(col) {
                *s += x;
            }
        }
    }

    let mut acc = Complex64::new(0.0, 0.0);
    for t in start..end {
        let j = t.trailing_zeros() as usize;
        subset ^= 1 << j;
        let col = &columns[j];
        if subset >> j & 1 == 1 {
            for (s, &x) in row_sums.iter_mut().zip(col) {
                *s += x;
            }
        } else {
            for (s, &x) in row_sums.iter_mut().zip(col) {
                *s -= x;
            }
        }
        let prod = row_sums.iter().fold(Complex64::new(1.0, 0.0), |p, &s| p * s);
        if subset.count_ones() % 2 == 0 {
            acc += prod;
        } else {
            acc -= prod;
        }
    }
    acc
}

/// Permanent by explicit summation over all permutations.
pub fn permanent_naive(a: &ComplexAmplitudeMatrix) -> Result<Complex64> {
    let n = check_square(a)?;
    if n > NAIVE_MAX_N {
        return Err(Error::SizeLimit(format!(
            "naive permanent limited to n <= {NAIVE_MAX_N}, got {n}"
        )));
    }
    fn walk(a: &ComplexAmplitudeMatrix, row: usize, used: &mut [bool], prod: Complex64) -> Complex64 {
        if row == used.len() {
            return prod;
        }
        let mut sum = Complex64::new(0.0, 0.0);
        for col in 0..used.len() {
            if !used[col] {
                used[col] = true;
                sum += walk(a, row + 1, used, prod * a[(row, col)]);
                used[col] = false;
            }
        }
        sum
    }
    Ok(walk(a, 0, &mut vec![false; n], Complex64::new(1.0, 0.0)))
}
