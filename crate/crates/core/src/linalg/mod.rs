//! Dense complex linear algebra built on plain `Vec` storage.
//!
//! Everything here is written from scratch: the Hermitian eigensolver is a
//! cyclic Jacobi method, singular values come from one-sided Jacobi
//! orthogonalization, and general eigenvalues are only available for small
//! matrices through the characteristic polynomial.

mod eigen;
mod general;
mod spectral;
mod svd;

use std::fmt;
use std::ops::{Index, IndexMut};

use serde::Serialize;

use crate::error::{Error, Result};

pub use eigen::{hermitian_eig, SpectralDecomposition, MAX_SWEEPS};
pub use general::{characteristic_polynomial, eigenvalues_general, eigenvalues_psd_product, GENERAL_DIM_CAP};
pub use spectral::{spectral_apply, SpectralFunction};
pub use svd::{singular_values, singular_values_via_gram};

pub type C64 = num_complex::Complex64;

/// Dense row-major complex matrix with at least one row and one column.
#[derive(Clone, PartialEq)]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    data: Vec<C64>,
}

impl ComplexMatrix {
    /// Zero matrix. Panics if either dimension is zero.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        assert!(rows >= 1 && cols >= 1, "matrix dimensions must be positive");
        ComplexMatrix { rows, cols, data: vec![C64::new(0.0, 0.0); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> C64) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                m[(i, j)] = f(i, j);
            }
        }
        m
    }

    /// Square diagonal matrix with real entries.
    pub fn from_real_diag(diag: &[f64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { C64::new(diag[i], 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn from_diag(diag: &[C64]) -> Self {
        let n = diag.len();
        Self::from_fn(n, n, |i, j| if i == j { diag[i] } else { C64::new(0.0, 0.0) })
    }

    /// Builds a matrix from rows, validating shape and finiteness.
    pub fn from_rows(rows: Vec<Vec<C64>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if r == 0 || c == 0 {
            return Err(Error::Dimension("matrix must have at least one row and one column".into()));
        }
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        let data: Vec<C64> = rows.into_iter().flatten().collect();
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::Domain("matrix entries must be finite".into()));
        }
        Ok(ComplexMatrix { rows: r, cols: c, data })
    }

    /// Real matrix from row-major rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        Self::from_rows(rows.iter().map(|r| r.iter().map(|&x| C64::new(x, 0.0)).collect()).collect())
    }

    /// Builds a matrix from separate real and imaginary row-major grids.
    /// An empty imaginary grid means a real matrix.
    pub fn from_re_im(re: &[Vec<f64>], im: &[Vec<f64>]) -> Result<Self> {
        if im.is_empty() {
            return Self::from_real_rows(re);
        }
        if re.len() != im.len() || re.iter().zip(im).any(|(a, b)| a.len() != b.len()) {
            return Err(Error::Dimension("real and imaginary grids differ in shape".into()));
        }
        Self::from_rows(
            re.iter().zip(im).map(|(a, b)| a.iter().zip(b).map(|(&x, &y)| C64::new(x, y)).collect()).collect(),
        )
    }

    /// Splits into real and imaginary row-major grids.
    pub fn to_re_im(&self) -> (Vec<Vec<f64>>, Vec<Vec<f64>>) {
        let re = (0..self.rows).map(|i| self.row(i).iter().map(|z| z.re).collect()).collect();
        let im = (0..self.rows).map(|i| self.row(i).iter().map(|z| z.im).collect()).collect();
        (re, im)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.rows, self.cols)
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn row(&self, i: usize) -> &[C64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<C64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn as_slice(&self) -> &[C64] {
        &self.data
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn matmul(&self, other: &Self) -> Result<Self> {
        if self.cols != other.rows {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            let out_row = &mut out.data[i * other.cols..(i + 1) * other.cols];
            for (k, &a) in self.row(i).iter().enumerate() {
                if a.re == 0.0 && a.im == 0.0 {
                    continue;
                }
                for (o, &b) in out_row.iter_mut().zip(other.row(k)) {
                    *o += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn checked_add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn checked_sub(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &Self, f: impl Fn(C64, C64) -> C64) -> Result<Self> {
        if self.shape() != other.shape() {
            return Err(Error::Dimension(format!(
                "shape mismatch: {}x{} vs {}x{}",
                self.rows, self.cols, other.rows, other.cols
            )));
        }
        let data = self.data.iter().zip(&other.data).map(|(&a, &b)| f(a, b)).collect();
        Ok(ComplexMatrix { rows: self.rows, cols: self.cols, data })
    }

    pub fn scaled(&self, factor: f64) -> Self {
        ComplexMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|z| z * factor).collect() }
    }

    /// `self · diag(weights)`.
    pub fn scale_columns(&self, weights: &[f64]) -> Result<Self> {
        if weights.len() != self.cols {
            return Err(Error::Dimension(format!("{} column weights for {} columns", weights.len(), self.cols)));
        }
        Ok(Self::from_fn(self.rows, self.cols, |i, j| self[(i, j)] * weights[j]))
    }

    /// Largest entry modulus; the reference scale for relative tolerances.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> C64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    pub fn diagonal(&self) -> Vec<C64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Largest `|a_ij - conj(a_ji)|`; infinite for non-square input.
    pub fn hermitian_residual(&self) -> f64 {
        if !self.is_square() {
            return f64::INFINITY;
        }
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in i..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)].conj()).norm());
            }
        }
        worst
    }

    /// `(A + A*) / 2`. Panics on non-square input.
    pub fn hermitian_part(&self) -> Self {
        assert!(self.is_square());
        Self::from_fn(self.rows, self.cols, |i, j| (self[(i, j)] + self[(j, i)].conj()) * 0.5)
    }

    /// Largest entry modulus of the difference; infinite on shape mismatch.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        if self.shape() != other.shape() {
            return f64::INFINITY;
        }
        self.data.iter().zip(&other.data).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
    }
}

impl Index<(usize, usize)> for ComplexMatrix {
    type Output = C64;

    fn index(&self, (i, j): (usize, usize)) -> &C64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ComplexMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut C64 {
        &mut self.data[i * self.cols + j]
    }
}

impl fmt::Debug for ComplexMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "ComplexMatrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for z in self.row(i) {
                write!(f, "{:>10.4}{:+.4}i ", z.re, z.im)?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

pub fn adjoint(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn matmul(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix> {
    a.matmul(b)
}

/// Block-diagonal matrix with the given blocks; off-block entries are exactly zero.
pub fn direct_sum(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    if blocks.is_empty() {
        return Err(Error::Usage("direct sum of an empty list".into()));
    }
    let rows = blocks.iter().map(ComplexMatrix::rows).sum();
    let cols = blocks.iter().map(ComplexMatrix::cols).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let (mut r0, mut c0) = (0, 0);
    for b in blocks {
        for i in 0..b.rows() {
            for j in 0..b.cols() {
                out[(r0 + i, c0 + j)] = b[(i, j)];
            }
        }
        r0 += b.rows();
        c0 += b.cols();
    }
    Ok(out)
}

/// Horizontal concatenation `(B_1 | B_2 | ... | B_K)`.
pub fn hconcat(blocks: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    let first = blocks.first().ok_or_else(|| Error::Usage("concatenation of an empty list".into()))?;
    let rows = first.rows();
    if let Some(bad) = blocks.iter().find(|b| b.rows() != rows) {
        return Err(Error::Dimension(format!("row count {} does not match {}", bad.rows(), rows)));
    }
    let cols = blocks.iter().map(ComplexMatrix::cols).sum();
    let mut out = ComplexMatrix::zeros(rows, cols);
    let mut c0 = 0;
    for b in blocks {
        for i in 0..rows {
            for j in 0..b.cols() {
                out[(i, c0 + j)] = b[(i, j)];
            }
        }
        c0 += b.cols();
    }
    Ok(out)
}

/// Keeps the diagonal and zeroes every off-diagonal entry.
pub fn diag_of(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !a.is_square() {
        return Err(Error::Dimension(format!("diag_of needs a square matrix, got {}x{}", a.rows(), a.cols())));
    }
    Ok(ComplexMatrix::from_diag(&a.diagonal()))
}

/// Real vector sorted non-increasingly.
#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(transparent)]
pub struct SortedSpectrum(Vec<f64>);

impl SortedSpectrum {
    /// Sorts a copy of `values` in non-increasing order. NaN entries are rejected.
    pub fn from_unsorted(mut values: Vec<f64>) -> Result<Self> {
        if values.iter().any(|v| v.is_nan()) {
            return Err(Error::Domain("NaN in spectrum".into()));
        }
        values.sort_by(|a, b| b.total_cmp(a));
        Ok(SortedSpectrum(values))
    }

    /// Appends zeros up to `len` and re-sorts (negative entries stay at the end).
    pub fn padded(&self, len: usize) -> Self {
        let mut v = self.0.clone();
        if v.len() < len {
            v.resize(len, 0.0);
            v.sort_by(|a, b| b.total_cmp(a));
        }
        SortedSpectrum(v)
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Largest entry, or zero for an empty spectrum.
    pub fn max(&self) -> f64 {
        self.0.first().copied().unwrap_or(0.0)
    }
}

impl AsRef<[f64]> for SortedSpectrum {
    fn as_ref(&self) -> &[f64] {
        &self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn adjoint_by_hand() {
        let a = ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 1.0)], vec![c(0.0, 0.0), c(0.0, 0.0)]]).unwrap();
        let expected =
            ComplexMatrix::from_rows(vec![vec![c(0.0, 0.0), c(0.0, 0.0)], vec![c(0.0, -1.0), c(0.0, 0.0)]]).unwrap();
        assert_eq!(a.adjoint(), expected);
        assert_eq!(ComplexMatrix::identity(2).adjoint(), ComplexMatrix::identity(2));
    }

    #[test]
    fn matmul_diagonals_and_shape_error() {
        let p = ComplexMatrix::from_real_diag(&[1.0, 2.0]).matmul(&ComplexMatrix::from_real_diag(&[3.0, 4.0])).unwrap();
        assert_eq!(p, ComplexMatrix::from_real_diag(&[3.0, 8.0]));
        let a = ComplexMatrix::zeros(2, 3);
        assert!(matches!(a.matmul(&a), Err(Error::Dimension(_))));
        let m = ComplexMatrix::from_fn(3, 2, |i, j| c(i as f64, j as f64 - 1.0));
        assert_eq!(ComplexMatrix::identity(3).matmul(&m).unwrap(), m);
    }

    #[test]
    fn direct_sum_blocks() {
        let d = direct_sum(&[ComplexMatrix::from_real_diag(&[1.0]), ComplexMatrix::from_real_diag(&[2.0])]).unwrap();
        assert_eq!(d, ComplexMatrix::from_real_diag(&[1.0, 2.0]));
        let i5 = direct_sum(&[ComplexMatrix::identity(2), ComplexMatrix::identity(3)]).unwrap();
        assert_eq!(i5, ComplexMatrix::identity(5));

        let a = ComplexMatrix::from_fn(2, 2, |i, j| c(1.0 + i as f64, j as f64));
        let b = ComplexMatrix::from_fn(3, 3, |i, j| c(-1.0, (i * j) as f64 + 0.5));
        let s = direct_sum(&[a.clone(), b.clone()]).unwrap();
        assert_eq!(s.shape(), (5, 5));
        for i in 0..5 {
            for j in 0..5 {
                let expected = match (i < 2, j < 2) {
                    (true, true) => a[(i, j)],
                    (false, false) => b[(i - 2, j - 2)],
                    _ => c(0.0, 0.0),
                };
                assert_eq!(s[(i, j)], expected);
            }
        }
        assert!(matches!(direct_sum(&[]), Err(Error::Usage(_))));
    }

    #[test]
    fn hconcat_identities() {
        let s = hconcat(&[ComplexMatrix::identity(2), ComplexMatrix::identity(2)]).unwrap();
        let expected = ComplexMatrix::from_real_rows(&[vec![1.0, 0.0, 1.0, 0.0], vec![0.0, 1.0, 0.0, 1.0]]).unwrap();
        assert_eq!(s, expected);
        let single = ComplexMatrix::from_fn(2, 3, |i, j| c(i as f64, j as f64));
        assert_eq!(hconcat(std::slice::from_ref(&single)).unwrap(), single);
        assert!(matches!(hconcat(&[ComplexMatrix::identity(2), ComplexMatrix::identity(3)]), Err(Error::Dimension(_))));
    }

    #[test]
    fn diag_of_keeps_diagonal() {
        let a =
            ComplexMatrix::from_rows(vec![vec![c(4.0, 0.0), c(1.0, 1.0)], vec![c(1.0, -1.0), c(3.0, 0.0)]]).unwrap();
        assert_eq!(diag_of(&a).unwrap(), ComplexMatrix::from_real_diag(&[4.0, 3.0]));
        let d = ComplexMatrix::from_real_diag(&[1.0, -2.0, 5.0]);
        assert_eq!(diag_of(&d).unwrap(), d);
        assert!(matches!(diag_of(&ComplexMatrix::zeros(2, 3)), Err(Error::Dimension(_))));
    }

    #[test]
    fn construction_rejects_bad_input() {
        assert!(ComplexMatrix::from_rows(vec![]).is_err());
        assert!(ComplexMatrix::from_real_rows(&[vec![1.0], vec![1.0, 2.0]]).is_err());
        assert!(ComplexMatrix::from_real_rows(&[vec![f64::NAN]]).is_err());
        assert!(ComplexMatrix::from_re_im(&[vec![1.0]], &[vec![1.0, 2.0]]).is_err());
    }

    #[test]
    fn sorted_spectrum_orders() {
        assert_eq!(SortedSpectrum::from_unsorted(vec![1.0, 3.0, 2.0]).unwrap().values(), &[3.0, 2.0, 1.0]);
        assert_eq!(SortedSpectrum::from_unsorted(vec![2.0, 2.0]).unwrap().values(), &[2.0, 2.0]);
        assert_eq!(SortedSpectrum::from_unsorted(vec![1.0, -1.0]).unwrap().padded(3).values(), &[1.0, 0.0, -1.0]);
    }
}
