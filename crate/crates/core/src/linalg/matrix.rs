use std::fmt;
use std::ops::{Index, IndexMut, Mul};

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Dense row-major matrix of complex amplitudes.
///
/// Entries are always finite. A `0 × 0` matrix is allowed and stands for the
/// empty submatrix of a zero-photon event.
#[derive(Clone, PartialEq)]
pub struct ComplexAmplitudeMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl ComplexAmplitudeMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<Complex64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{} entries supplied for a {rows}x{cols} matrix",
                data.len()
            )));
        }
        if let Some(pos) = data.iter().position(|z| !z.is_finite()) {
            return Err(Error::Numeric(format!(
                "non-finite entry at ({}, {})",
                pos / cols.max(1),
                pos % cols.max(1)
            )));
        }
        Ok(Self { rows, cols, data })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![Complex64::new(0.0, 0.0); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut out = Self::zeros(n, n);
        for i in 0..n {
            out[(i, i)] = Complex64::new(1.0, 0.0);
        }
        out
    }

    /// Builds a matrix from nested rows; every row must have the same length.
    pub fn from_rows<R, T>(rows: R) -> Result<Self>
    where
        R: IntoIterator,
        R::Item: IntoIterator<Item = T>,
        T: Into<Complex64>,
    {
        let mut data = Vec::new();
        let mut n_rows = 0;
        let mut n_cols = None;
        for row in rows {
            let before = data.len();
            data.extend(row.into_iter().map(Into::into));
            let len = data.len() - before;
            match n_cols {
                None => n_cols = Some(len),
                Some(c) if c != len => {
                    return Err(Error::Dimension(format!(
                        "ragged rows: expected {c} columns, row {n_rows} has {len}"
                    )))
                }
                _ => {}
            }
            n_rows += 1;
        }
        Self::new(n_rows, n_cols.unwrap_or(0), data)
    }

    pub fn from_real(rows: usize, cols: usize, data: &[f64]) -> Result<Self> {
        Self::new(rows, cols, data.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    /// Conjugate transpose.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)].conj();
            }
        }
        out
    }

    pub fn transpose(&self) -> Self {
        let mut out = Self::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                out[(j, i)] = self[(i, j)];
            }
        }
        out
    }

    pub fn matmul(&self, rhs: &Self) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut out = Self::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * rhs.cols..(i + 1) * rhs.cols];
            for (l, &a) in self.row(i).iter().enumerate() {
                if a == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(rhs.row(l)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    /// Horizontal concatenation `[self | other]`.
    pub fn hstack(blocks: &[Self]) -> Result<Self> {
        let rows = blocks.first().map_or(0, |b| b.rows);
        if blocks.iter().any(|b| b.rows != rows) {
            return Err(Error::Dimension("hstack blocks differ in row count".into()));
        }
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for b in blocks {
                data.extend_from_slice(b.row(i));
            }
        }
        Ok(Self { rows, cols, data })
    }

    /// Submatrix with the given row and column index lists. Indices may repeat.
    pub fn select(&self, rows: &[usize], cols: &[usize]) -> Result<Self> {
        if let Some(&r) = rows.iter().find(|&&r| r >= self.rows) {
            return Err(Error::Index(format!("row {r} of {}", self.rows)));
        }
        if let Some(&c) = cols.iter().find(|&&c| c >= self.cols) {
            return Err(Error::Index(format!("column {c} of {}", self.cols)));
        }
        let data = rows
            .iter()
            .flat_map(|&r| cols.iter().map(move |&c| (r, c)))
            .map(|(r, c)| self[(r, c)])
            .collect();
        Ok(Self {
            rows: rows.len(),
            cols: cols.len(),
            data,
        })
    }

    pub fn scale_row(&mut self, i: usize, factor: Complex64) {
        for z in &mut self.data[i * self.cols..(i + 1) * self.cols] {
            *z *= factor;
        }
    }

    pub fn scale_column(&mut self, j: usize, factor: Complex64) {
        for i in 0..self.rows {
            self.data[i * self.cols + j] *= factor;
        }
    }

    pub fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    pub fn swap_columns(&mut self, a: usize, b: usize) {
        for i in 0..self.rows {
            self.data.swap(i * self.cols + a, i * self.cols + b);
        }
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |self - other|` entrywise; `INFINITY` on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.rows != other.rows || self.cols != other.cols {
            return f64::INFINITY;
        }
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    /// `‖X†X − I‖_max`, the column-orthonormality residual.
    pub fn unitarity_residual(&self) -> f64 {
        gram_matrix(self).max_abs_diff(&Self::identity(self.cols))
    }

    pub fn column_norm(&self, j: usize) -> f64 {
        (0..self.rows).map(|i| self[(i, j)].norm_sqr()).sum::<f64>().sqrt()
    }
}

/// Gram matrix `V†V` of the columns of `v`.
pub fn gram_matrix(v: &ComplexAmplitudeMatrix) -> ComplexAmplitudeMatrix {
    let n = v.cols;
    let mut out = ComplexAmplitudeMatrix::zeros(n, n);
    for a in 0..n {
        for b in a..n {
            let mut acc = Complex64::new(0.0, 0.0);
            for i in 0..v.rows {
                acc += v[(i, a)].conj() * v[(i, b)];
            }
            out[(a, b)] = acc;
            out[(b, a)] = acc.conj();
        }
        // exact real diagonal
        out[(a, a)].im = 0.0;
    }
    out
}

impl Index<(usize, usize)> for ComplexAmplitudeMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexAmplitudeMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Mul for &ComplexAmplitudeMatrix {
    type Output = ComplexAmplitudeMatrix;

    /// Panics on shape mismatch; use [`ComplexAmplitudeMatrix::matmul`] for a fallible product.
    fn mul(self, rhs: Self) -> ComplexAmplitudeMatrix {
        self.matmul(rhs).expect("matrix shapes must agree")
    }
}

impl fmt::Debug for ComplexAmplitudeMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexAmplitudeMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:+.6}{:+.6}i  ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}
