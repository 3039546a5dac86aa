//! Stack-allocated complex matrices for the small MIMO dimensions used here
//! (at most 4x4). Everything runs in the inner simulation loop, so nothing
//! in this module allocates.

use num_complex::Complex64;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};

pub const MAX_DIM: usize = 4;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Dense complex matrix with up to `MAX_DIM` rows and columns, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CMat {
    rows: usize,
    cols: usize,
    data: [Complex64; MAX_DIM * MAX_DIM],
}

impl CMat {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows <= MAX_DIM && cols <= MAX_DIM, "matrix {rows}x{cols} exceeds {MAX_DIM}x{MAX_DIM}");
        CMat { rows, cols, data: [ZERO; MAX_DIM * MAX_DIM] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for r in 0..rows {
            for c in 0..cols {
                m[(r, c)] = f(r, c);
            }
        }
        m
    }

    /// Builds a matrix from row-major values.
    pub fn from_rows(rows: usize, cols: usize, values: &[Complex64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self::from_fn(rows, cols, |r, c| values[r * cols + c])
    }

    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)])
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |r, c| self[(c, r)].conj())
    }

    pub fn scale(&self, s: f64) -> Self {
        let mut m = *self;
        for v in m.data.iter_mut() {
            *v *= s;
        }
        m
    }

    pub fn mul(&self, rhs: &CMat) -> Self {
        assert_eq!(self.cols, rhs.rows, "dimension mismatch in product");
        let mut out = Self::zeros(self.rows, rhs.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(r, k)];
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    /// Computes `selfᴴ · rhs`.
    pub fn adjoint_mul(&self, rhs: &CMat) -> Self {
        assert_eq!(self.rows, rhs.rows, "dimension mismatch in adjoint product");
        let mut out = Self::zeros(self.cols, rhs.cols);
        for k in 0..self.rows {
            for r in 0..self.cols {
                let a = self[(k, r)].conj();
                for c in 0..rhs.cols {
                    out[(r, c)] += a * rhs[(k, c)];
                }
            }
        }
        out
    }

    /// Accumulates `s · B · Bᴴ` into this (square) matrix.
    pub fn add_outer(&mut self, b: &CMat, s: f64) {
        assert_eq!(self.rows, b.rows);
        assert_eq!(self.rows, self.cols);
        for r in 0..b.rows {
            for c in 0..=r {
                let mut acc = ZERO;
                for k in 0..b.cols {
                    acc += b[(r, k)] * b[(c, k)].conj();
                }
                acc *= s;
                self[(r, c)] += acc;
                if r != c {
                    self[(c, r)] += acc.conj();
                }
            }
        }
    }

    pub fn add_diagonal(&mut self, v: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)].re += v;
        }
    }

    pub fn frobenius_sq(&self) -> f64 {
        let mut acc = 0.0;
        for r in 0..self.rows {
            for c in 0..self.cols {
                acc += self[(r, c)].norm_sqr();
            }
        }
        acc
    }

    /// Column `c` as an `rows x 1` matrix.
    pub fn column(&self, c: usize) -> Self {
        Self::from_fn(self.rows, 1, |r, _| self[(r, c)])
    }

    /// Selects columns by index into a new matrix.
    pub fn select_columns(&self, cols: &[usize]) -> Self {
        Self::from_fn(self.rows, cols.len(), |r, c| self[(r, cols[c])])
    }
}

impl Index<(usize, usize)> for CMat {
    type Output = Complex64;

    #[inline]
    fn index(&self, (r, c): (usize, usize)) -> &Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &self.data[r * MAX_DIM + c]
    }
}

impl IndexMut<(usize, usize)> for CMat {
    #[inline]
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut Complex64 {
        debug_assert!(r < self.rows && c < self.cols);
        &mut self.data[r * MAX_DIM + c]
    }
}

/// Cholesky factor `L` (lower triangular) of a Hermitian positive-definite matrix.
#[derive(Clone, Copy, Debug)]
pub struct Cholesky {
    l: CMat,
}

impl Cholesky {
    pub fn new(a: &CMat) -> Result<Self> {
        assert_eq!(a.rows, a.cols);
        let n = a.rows;
        let mut l = CMat::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)].re;
            for k in 0..j {
                d -= l[(j, k)].norm_sqr();
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::Conditioning);
            }
            let d = d.sqrt();
            l[(j, j)] = Complex64::new(d, 0.0);
            for i in (j + 1)..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)].conj();
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Cholesky { l })
    }

    /// Solves `L y = b` for every column of `b`.
    pub fn forward(&self, b: &CMat) -> CMat {
        let n = self.l.rows;
        assert_eq!(b.rows, n);
        let mut y = *b;
        for c in 0..b.cols {
            for i in 0..n {
                let mut s = y[(i, c)];
                for k in 0..i {
                    s -= self.l[(i, k)] * y[(k, c)];
                }
                y[(i, c)] = s / self.l[(i, i)].re;
            }
        }
        y
    }

    /// Computes `bᴴ A⁻¹ b` as `(L⁻¹b)ᴴ (L⁻¹b)`.
    pub fn quad_form(&self, b: &CMat) -> CMat {
        let y = self.forward(b);
        y.adjoint_mul(&y)
    }
}

/// Inverse of a Hermitian positive-definite matrix of size at most 2, used on
/// the per-stream Gram matrices. Returns only the diagonal.
pub fn inverse_diagonal_hpd(k: &CMat) -> Result<[f64; MAX_DIM]> {
    let mut out = [0.0; MAX_DIM];
    match k.rows {
        1 => {
            let v = k[(0, 0)].re;
            if !(v > 0.0) {
                return Err(Error::Conditioning);
            }
            out[0] = 1.0 / v;
        }
        2 => {
            let a = k[(0, 0)].re;
            let d = k[(1, 1)].re;
            let det = a * d - k[(0, 1)].norm_sqr();
            if !(det > 0.0) {
                return Err(Error::Conditioning);
            }
            out[0] = d / det;
            out[1] = a / det;
        }
        n => {
            // General path: invert via Cholesky, one unit vector at a time.
            let ch = Cholesky::new(k)?;
            for i in 0..n {
                let e = CMat::from_fn(n, 1, |r, _| if r == i { ONE } else { ZERO });
                out[i] = ch.quad_form(&e)[(0, 0)].re;
            }
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn product_and_adjoint() {
        let a = CMat::from_rows(2, 2, &[c(1.0, 1.0), c(0.0, 2.0), c(3.0, 0.0), c(-1.0, 0.5)]);
        let b = a.adjoint();
        assert_eq!(b[(0, 1)], c(3.0, 0.0));
        assert_eq!(b[(1, 0)], c(0.0, -2.0));
        let direct = a.adjoint().mul(&a);
        let fused = a.adjoint_mul(&a);
        for r in 0..2 {
            for k in 0..2 {
                assert!((direct[(r, k)] - fused[(r, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn outer_accumulation_matches_product() {
        let b = CMat::from_rows(3, 2, &[c(1.0, 0.0), c(0.5, -1.0), c(0.0, 2.0), c(1.0, 1.0), c(-2.0, 0.0), c(0.3, 0.3)]);
        let mut acc = CMat::zeros(3, 3);
        acc.add_outer(&b, 2.0);
        let direct = b.mul(&b.adjoint()).scale(2.0);
        for r in 0..3 {
            for k in 0..3 {
                assert!((acc[(r, k)] - direct[(r, k)]).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn cholesky_quad_form() {
        // A = diag(2, 4): bᴴA⁻¹b for b = (1, 2)ᵀ is 1/2 + 4/4 = 1.5
        let mut a = CMat::zeros(2, 2);
        a[(0, 0)] = c(2.0, 0.0);
        a[(1, 1)] = c(4.0, 0.0);
        let b = CMat::from_rows(2, 1, &[c(1.0, 0.0), c(0.0, 2.0)]);
        let q = Cholesky::new(&a).unwrap().quad_form(&b);
        assert!((q[(0, 0)].re - 1.5).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let mut a = CMat::identity(2);
        a[(1, 1)] = c(-1.0, 0.0);
        assert_eq!(Cholesky::new(&a).unwrap_err(), Error::Conditioning);
    }

    #[test]
    fn inverse_diagonal_general_path() {
        let mut k = CMat::identity(3);
        k[(0, 1)] = c(0.5, 0.0);
        k[(1, 0)] = c(0.5, 0.0);
        let d = inverse_diagonal_hpd(&k).unwrap();
        // [[1, .5], [.5, 1]]⁻¹ has diagonal 1 / 0.75
        assert!((d[0] - 4.0 / 3.0).abs() < 1e-12);
        assert!((d[1] - 4.0 / 3.0).abs() < 1e-12);
        assert!((d[2] - 1.0).abs() < 1e-12);
    }
}
