//! Small dense real matrices.
//!
//! Storage is row-major in a single `Vec<f64>`. The sizes that appear in the
//! rate formulas are tiny (a handful of antennas), so every kernel is the
//! textbook O(n^3) loop without blocking.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::{Index, IndexMut};

use crate::math::{hypot, sqrt};
use crate::{Error, Result};

/// Relative pivot tolerance for the semi-definite Cholesky factorization.
pub const TOL_PIVOT: f64 = 1e-10;
/// Relative tolerance for `L L^T = K`.
pub const TOL_FACTOR: f64 = 1e-9;
/// Relative tolerance for symmetry checks.
pub const TOL_SYMMETRY: f64 = 1e-9;

/// Dense row-major real matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl fmt::Debug for Matrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut list = f.debug_list();
        for i in 0..self.rows {
            list.entry(&self.row(i));
        }
        list.finish()
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl Matrix {
    /// All-zero `rows x cols` matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    /// `n x n` identity.
    pub fn identity(n: usize) -> Self {
        let mut m = Matrix::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    /// Square diagonal matrix with the given diagonal.
    pub fn from_diag(diag: &[f64]) -> Self {
        let mut m = Matrix::zeros(diag.len(), diag.len());
        for (i, &d) in diag.iter().enumerate() {
            m[(i, i)] = d;
        }
        m
    }

    /// Builds a matrix from row-major data.
    pub fn from_vec(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != rows * cols {
            return Err(Error::Dimension {
                context: "matrix data length",
            });
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Builds a matrix from a slice of equally long rows.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_rows = rows.len();
        let n_cols = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n_rows * n_cols);
        for r in rows {
            let r = r.as_ref();
            if r.len() != n_cols {
                return Err(Error::Dimension {
                    context: "ragged matrix rows",
                });
            }
            data.extend_from_slice(r);
        }
        Ok(Matrix {
            rows: n_rows,
            cols: n_cols,
            data,
        })
    }

    /// Column vector from a slice.
    pub fn column(v: &[f64]) -> Self {
        Matrix {
            rows: v.len(),
            cols: 1,
            data: v.to_vec(),
        }
    }

    /// Number of rows.
    #[inline]
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    #[inline]
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Whether the matrix is square.
    #[inline]
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    /// Row `i` as a slice.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// Underlying row-major storage.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Rows as owned vectors (for serialization).
    pub fn to_rows(&self) -> Vec<Vec<f64>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    /// Diagonal entries.
    pub fn diag(&self) -> Vec<f64> {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).collect()
    }

    /// Transpose.
    pub fn transpose(&self) -> Matrix {
        let mut t = Matrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)];
            }
        }
        t
    }

    /// Matrix product `self * rhs`.
    ///
    /// Panics if the inner dimensions differ; every caller in the crate
    /// multiplies shapes that were validated on construction.
    pub fn mul(&self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.cols, rhs.rows, "matrix product dimension mismatch");
        let mut out = Matrix::zeros(self.rows, rhs.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                for j in 0..rhs.cols {
                    out[(i, j)] += a * rhs[(k, j)];
                }
            }
        }
        out
    }

    /// Entrywise sum.
    pub fn add(&self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a + b)
    }

    /// Entrywise difference.
    pub fn sub(&self, rhs: &Matrix) -> Matrix {
        self.zip_with(rhs, |a, b| a - b)
    }

    fn zip_with(&self, rhs: &Matrix, f: impl Fn(f64, f64) -> f64) -> Matrix {
        assert_eq!(
            (self.rows, self.cols),
            (rhs.rows, rhs.cols),
            "entrywise operation dimension mismatch"
        );
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().zip(&rhs.data).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `c * self`.
    pub fn scale(&self, c: f64) -> Matrix {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|&a| c * a).collect(),
        }
    }

    /// `self + c * I` for square matrices.
    pub fn add_identity(&self, c: f64) -> Matrix {
        debug_assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..m.rows {
            m[(i, i)] += c;
        }
        m
    }

    /// `self * self^T`.
    pub fn gram(&self) -> Matrix {
        self.mul(&self.transpose())
    }

    /// Sum of diagonal entries.
    pub fn trace(&self) -> f64 {
        (0..self.rows.min(self.cols)).map(|i| self[(i, i)]).sum()
    }

    /// Largest absolute entry (0 for an empty matrix).
    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, &a| m.max(a.abs()))
    }

    /// Whether every entry is finite.
    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|a| a.is_finite())
    }

    /// Whether every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&a| a == 0.0)
    }

    /// Whether every off-diagonal entry is exactly zero.
    pub fn is_diagonal(&self) -> bool {
        for i in 0..self.rows {
            for j in 0..self.cols {
                if i != j && self[(i, j)] != 0.0 {
                    return false;
                }
            }
        }
        true
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn max_asymmetry(&self) -> f64 {
        debug_assert!(self.is_square());
        let mut worst = 0.0f64;
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                worst = worst.max((self[(i, j)] - self[(j, i)]).abs());
            }
        }
        worst
    }

    /// `(A + A^T) / 2`.
    pub fn symmetrize(&self) -> Matrix {
        debug_assert!(self.is_square());
        let mut m = self.clone();
        for i in 0..self.rows {
            for j in (i + 1)..self.cols {
                let avg = 0.5 * (self[(i, j)] + self[(j, i)]);
                m[(i, j)] = avg;
                m[(j, i)] = avg;
            }
        }
        m
    }

    /// Determinant by Gaussian elimination with partial pivoting.
    ///
    /// Returns exactly `0.0` when a pivot is negligible relative to the
    /// entry scale, and `1.0` for the empty matrix.
    pub fn det(&self) -> f64 {
        assert!(self.is_square(), "determinant of a non-square matrix");
        let n = self.rows;
        let mut a = self.data.clone();
        let scale = self.max_abs();
        if scale == 0.0 {
            return if n == 0 { 1.0 } else { 0.0 };
        }
        let negligible = f64::EPSILON * scale * n as f64 * 1e-3;
        let mut det = 1.0;
        for k in 0..n {
            let mut p = k;
            let mut best = a[k * n + k].abs();
            for i in (k + 1)..n {
                let v = a[i * n + k].abs();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if best <= negligible {
                return 0.0;
            }
            if p != k {
                for j in 0..n {
                    a.swap(k * n + j, p * n + j);
                }
                det = -det;
            }
            let pivot = a[k * n + k];
            det *= pivot;
            for i in (k + 1)..n {
                let factor = a[i * n + k] / pivot;
                if factor == 0.0 {
                    continue;
                }
                for j in (k + 1)..n {
                    a[i * n + j] -= factor * a[k * n + j];
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan elimination with partial pivoting.
    pub fn inverse(&self) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension {
                context: "inverse of a non-square matrix",
            });
        }
        let n = self.rows;
        let mut a = self.clone();
        let mut inv = Matrix::identity(n);
        let scale = self.max_abs();
        if scale == 0.0 && n > 0 {
            return Err(Error::Singular("zero matrix"));
        }
        for k in 0..n {
            let mut p = k;
            for i in (k + 1)..n {
                if a[(i, k)].abs() > a[(p, k)].abs() {
                    p = i;
                }
            }
            if a[(p, k)].abs() <= f64::EPSILON * scale {
                return Err(Error::Singular("pivot below machine precision"));
            }
            if p != k {
                for j in 0..n {
                    a.data.swap(k * n + j, p * n + j);
                    inv.data.swap(k * n + j, p * n + j);
                }
            }
            let pivot = a[(k, k)];
            for j in 0..n {
                a[(k, j)] /= pivot;
                inv[(k, j)] /= pivot;
            }
            for i in 0..n {
                if i == k {
                    continue;
                }
                let factor = a[(i, k)];
                if factor == 0.0 {
                    continue;
                }
                for j in 0..n {
                    a[(i, j)] -= factor * a[(k, j)];
                    inv[(i, j)] -= factor * inv[(k, j)];
                }
            }
        }
        Ok(inv)
    }

    /// Semi-definite Cholesky factor `L` (lower triangular, non-negative
    /// diagonal) with `L L^T = self`.
    ///
    /// Pivots are compared against `tol = tol_pivot * max(1, max_i K_ii)`. A
    /// pivot inside `[-tol, tol]` is set to zero and the rest of its column is
    /// zeroed, which makes the factor of a singular matrix deterministic. The
    /// exception is a small positive pivot whose column is not negligible but
    /// still satisfies `s_i^2 <= d d_i` against the remaining diagonal: rank-1
    /// matrices nearly aligned with a later axis have such pivots, and zeroing
    /// them would discard off-diagonal mass of order `sqrt(d d_i)`.
    pub fn cholesky_lower(&self, tol_pivot: f64) -> Result<Matrix> {
        if !self.is_square() {
            return Err(Error::Dimension {
                context: "cholesky of a non-square matrix",
            });
        }
        if !self.is_finite() {
            return Err(Error::NonFinite { context: "cholesky input" });
        }
        let n = self.rows;
        let asym = self.max_asymmetry();
        if asym > TOL_SYMMETRY * (1.0 + self.max_abs()) {
            return Err(Error::NotSymmetric { asymmetry: asym });
        }
        let diag_scale = self.diag().into_iter().fold(1.0f64, f64::max);
        let tol = tol_pivot * diag_scale;
        let mut l = Matrix::zeros(n, n);
        let mut column = alloc::vec![0.0; n];
        for j in 0..n {
            let mut d = self[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if d < -tol {
                return Err(Error::NotPsd { pivot: j, value: d });
            }
            for i in (j + 1)..n {
                let mut s = 0.5 * (self[(i, j)] + self[(j, i)]);
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                column[i] = s;
            }
            if d <= tol {
                let negligible = column[j + 1..].iter().all(|s| s.abs() <= tol);
                let consistent = d > 0.0
                    && (j + 1..n).all(|i| {
                        let mut di = self[(i, i)];
                        for k in 0..j {
                            di -= l[(i, k)] * l[(i, k)];
                        }
                        column[i] * column[i] <= (1.0 + 1e-6) * d * di.max(0.0)
                    });
                if negligible || !consistent {
                    continue;
                }
            }
            let ljj = sqrt(d);
            l[(j, j)] = ljj;
            for i in (j + 1)..n {
                l[(i, j)] = column[i] / ljj;
            }
        }
        Ok(l)
    }

    /// Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in descending order and the matching orthonormal
    /// eigenvectors as the columns of the second matrix.
    pub fn symmetric_eigen(&self) -> Result<(Vec<f64>, Matrix)> {
        if !self.is_square() {
            return Err(Error::Dimension {
                context: "eigen-decomposition of a non-square matrix",
            });
        }
        if !self.is_finite() {
            return Err(Error::NonFinite { context: "eigen input" });
        }
        let n = self.rows;
        let mut a = self.symmetrize();
        let mut v = Matrix::identity(n);
        let total = a.data.iter().map(|x| x * x).sum::<f64>();
        for _sweep in 0..100 {
            let mut off = 0.0;
            for i in 0..n {
                for j in (i + 1)..n {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
            if off <= 1e-32 * total || off == 0.0 {
                break;
            }
            for p in 0..n {
                for q in (p + 1)..n {
                    let apq = a[(p, q)];
                    if apq == 0.0 {
                        continue;
                    }
                    let theta = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                    let sign = if theta >= 0.0 { 1.0 } else { -1.0 };
                    let t = sign / (theta.abs() + hypot(theta, 1.0));
                    let c = 1.0 / hypot(t, 1.0);
                    let s = t * c;
                    for k in 0..n {
                        let akp = a[(k, p)];
                        let akq = a[(k, q)];
                        a[(k, p)] = c * akp - s * akq;
                        a[(k, q)] = s * akp + c * akq;
                    }
                    for k in 0..n {
                        let apk = a[(p, k)];
                        let aqk = a[(q, k)];
                        a[(p, k)] = c * apk - s * aqk;
                        a[(q, k)] = s * apk + c * aqk;
                    }
                    for k in 0..n {
                        let vkp = v[(k, p)];
                        let vkq = v[(k, q)];
                        v[(k, p)] = c * vkp - s * vkq;
                        v[(k, q)] = s * vkp + c * vkq;
                    }
                }
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&i, &j| a[(j, j)].total_cmp(&a[(i, i)]));
        let values = order.iter().map(|&i| a[(i, i)]).collect();
        let mut vectors = Matrix::zeros(n, n);
        for (dst, &src) in order.iter().enumerate() {
            for k in 0..n {
                vectors[(k, dst)] = v[(k, src)];
            }
        }
        Ok((values, vectors))
    }

    /// `V diag(d) V^T` for a square `V`.
    pub fn reconstruct(vectors: &Matrix, values: &[f64]) -> Matrix {
        let n = vectors.rows;
        let mut out = Matrix::zeros(n, n);
        for (k, &d) in values.iter().enumerate() {
            if d == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = vectors[(i, k)] * d;
                for j in 0..n {
                    out[(i, j)] += vik * vectors[(j, k)];
                }
            }
        }
        out
    }
}

/// Determinant of a square matrix.
pub fn det(m: &Matrix) -> f64 {
    m.det()
}

/// Semi-definite Cholesky factor with the crate's default pivot tolerance.
pub fn cholesky_lower(k: &Matrix) -> Result<Matrix> {
    k.cholesky_lower(TOL_PIVOT)
}
