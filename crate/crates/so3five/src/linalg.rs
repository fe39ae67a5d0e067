//! Small dense matrices over a [`Field`], with exact or tolerance-based
//! Gaussian elimination, null spaces and spectral projectors.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{Field, Ring};

/// Dense row-major matrix.
#[derive(Clone, PartialEq)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    data: Vec<T>,
}

impl<T: fmt::Debug> fmt::Debug for Matrix<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for r in 0..self.rows {
            let row: Vec<String> = (0..self.cols)
                .map(|c| format!("{:?}", self.data[r * self.cols + c]))
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl<T> Index<(usize, usize)> for Matrix<T> {
    type Output = T;
    fn index(&self, (r, c): (usize, usize)) -> &T {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &self.data[r * self.cols + c]
    }
}

impl<T> IndexMut<(usize, usize)> for Matrix<T> {
    fn index_mut(&mut self, (r, c): (usize, usize)) -> &mut T {
        assert!(r < self.rows && c < self.cols, "matrix index out of range");
        &mut self.data[r * self.cols + c]
    }
}

impl<T: Ring> Matrix<T> {
    /// Zero matrix.
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![T::zero(); rows * cols],
        }
    }

    /// Identity matrix.
    pub fn identity(n: usize) -> Self {
        Matrix::from_fn(n, n, |r, c| if r == c { T::one() } else { T::zero() })
    }

    /// Matrix with entries `f(r, c)`.
    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> T) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for c in 0..cols {
                data.push(f(r, c));
            }
        }
        Matrix { rows, cols, data }
    }

    /// Builds a matrix from rows; all rows must have equal length.
    pub fn from_rows(rows: Vec<Vec<T>>) -> Result<Self> {
        let n = rows.len();
        let m = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != m) {
            return Err(Error::dimension("ragged rows"));
        }
        Ok(Matrix {
            rows: n,
            cols: m,
            data: rows.into_iter().flatten().collect(),
        })
    }

    /// Diagonal matrix.
    pub fn diag(entries: &[T]) -> Self {
        let n = entries.len();
        Matrix::from_fn(n, n, |r, c| if r == c { entries[r].clone() } else { T::zero() })
    }

    /// Number of rows.
    pub fn rows(&self) -> usize {
        self.rows
    }

    /// Number of columns.
    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Row `r` as a vector.
    pub fn row(&self, r: usize) -> Vec<T> {
        self.data[r * self.cols..(r + 1) * self.cols].to_vec()
    }

    /// Column `c` as a vector.
    pub fn col(&self, c: usize) -> Vec<T> {
        (0..self.rows).map(|r| self[(r, c)].clone()).collect()
    }

    /// Entries in row-major order.
    pub fn as_slice(&self) -> &[T] {
        &self.data
    }

    /// Transpose.
    pub fn transpose(&self) -> Self {
        Matrix::from_fn(self.cols, self.rows, |r, c| self[(c, r)].clone())
    }

    /// Entrywise map.
    pub fn map<U: Ring>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    /// Product `self · o`.
    pub fn mul(&self, o: &Matrix<T>) -> Result<Self> {
        if self.cols != o.rows {
            return Err(Error::dimension(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, o.rows, o.cols
            )));
        }
        let mut out: Matrix<T> = Matrix::zeros(self.rows, o.cols);
        for r in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(r, k)];
                if a.is_zero() {
                    continue;
                }
                for c in 0..o.cols {
                    let b = &o[(k, c)];
                    if !b.is_zero() {
                        out[(r, c)] = out[(r, c)].clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[T]) -> Result<Vec<T>> {
        if v.len() != self.cols {
            return Err(Error::dimension(format!(
                "{}x{} applied to length {}",
                self.rows,
                self.cols,
                v.len()
            )));
        }
        Ok((0..self.rows)
            .map(|r| {
                (0..self.cols).fold(T::zero(), |acc, c| {
                    if v[c].is_zero() || self[(r, c)].is_zero() {
                        acc
                    } else {
                        acc + self[(r, c)].clone() * v[c].clone()
                    }
                })
            })
            .collect())
    }

    fn zip(&self, o: &Matrix<T>, f: impl Fn(T, T) -> T) -> Result<Self> {
        if self.rows != o.rows || self.cols != o.cols {
            return Err(Error::dimension("shape mismatch in entrywise operation"));
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| f(a.clone(), b.clone()))
                .collect(),
        })
    }

    /// Sum.
    pub fn add(&self, o: &Matrix<T>) -> Result<Self> {
        self.zip(o, |a, b| a + b)
    }

    /// Difference.
    pub fn sub(&self, o: &Matrix<T>) -> Result<Self> {
        self.zip(o, |a, b| a - b)
    }

    /// Scalar multiple.
    pub fn scale(&self, s: &T) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// Commutator `AB − BA`.
    pub fn commutator(&self, o: &Matrix<T>) -> Result<Self> {
        self.mul(o)?.sub(&o.mul(self)?)
    }

    /// Trace of a square matrix.
    pub fn trace(&self) -> T {
        (0..self.rows.min(self.cols)).fold(T::zero(), |acc, i| acc + self[(i, i)].clone())
    }

    /// True when every entry is exactly zero.
    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// True when square and `Aᵀ = A`.
    pub fn is_symmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose()
    }

    /// True when square and `Aᵀ = −A`.
    pub fn is_antisymmetric(&self) -> bool {
        self.rows == self.cols && *self == self.transpose().map(|x| -x.clone())
    }

    /// Vertical concatenation.
    pub fn stack(blocks: &[Matrix<T>]) -> Result<Self> {
        let cols = blocks.first().map_or(0, |b| b.cols);
        if blocks.iter().any(|b| b.cols != cols) {
            return Err(Error::dimension("stacked blocks differ in column count"));
        }
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            data.extend(b.data.iter().cloned());
            rows += b.rows;
        }
        Ok(Matrix { rows, cols, data })
    }

    /// Matrix with the given vectors as columns.
    pub fn from_cols(cols: &[Vec<T>]) -> Result<Self> {
        let rows = cols.first().map_or(0, Vec::len);
        if cols.iter().any(|c| c.len() != rows) {
            return Err(Error::dimension("columns differ in length"));
        }
        Ok(Matrix::from_fn(rows, cols.len(), |r, c| cols[c][r].clone()))
    }
}

impl<T: Field> Matrix<T> {
    /// Largest entry magnitude, as `f64`.
    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(Field::abs_f64).fold(0.0, f64::max)
    }

    /// Frobenius norm, as `f64`.
    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x.to_f64().powi(2)).sum::<f64>().sqrt()
    }

    /// True when every entry is negligible at tolerance `tol`.
    pub fn is_negligible(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.is_negligible(tol))
    }

    /// Reduced row echelon form and pivot columns.
    ///
    /// Exact kinds use exact zero tests. Float kinds treat an entry as zero
    /// when its magnitude is at most `tol · (max row norm)`, and pick the
    /// largest available pivot in each column.
    pub fn rref(&self, tol: f64) -> (Matrix<T>, Vec<usize>) {
        let mut m = self.clone();
        let max_row_norm = (0..m.rows)
            .map(|r| crate::scalar::norm_f64(&m.row(r)))
            .fold(0.0, f64::max);
        let thresh = tol * max_row_norm.max(1.0);
        let mut pivots = Vec::new();
        let mut pr = 0;
        for c in 0..m.cols {
            if pr == m.rows {
                break;
            }
            let best = (pr..m.rows)
                .filter(|&r| !m[(r, c)].is_negligible(thresh))
                .max_by(|&a, &b| {
                    m[(a, c)]
                        .abs_f64()
                        .partial_cmp(&m[(b, c)].abs_f64())
                        .unwrap_or(std::cmp::Ordering::Equal)
                });
            let Some(best) = best else {
                for r in pr..m.rows {
                    m[(r, c)] = T::zero();
                }
                continue;
            };
            if best != pr {
                for k in 0..m.cols {
                    m.data.swap(best * m.cols + k, pr * m.cols + k);
                }
            }
            let p = m[(pr, c)].clone();
            for k in c..m.cols {
                if !m[(pr, k)].is_zero() {
                    m[(pr, k)] = m[(pr, k)].clone() / p.clone();
                }
            }
            m[(pr, c)] = T::one();
            for r in 0..m.rows {
                if r == pr || m[(r, c)].is_zero() {
                    continue;
                }
                let f = m[(r, c)].clone();
                for k in c..m.cols {
                    if !m[(pr, k)].is_zero() {
                        m[(r, k)] = m[(r, k)].clone() - f.clone() * m[(pr, k)].clone();
                    }
                }
                m[(r, c)] = T::zero();
            }
            pivots.push(c);
            pr += 1;
        }
        (m, pivots)
    }

    /// Rank at tolerance `tol`.
    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).1.len()
    }

    /// Basis of the kernel, one vector per free column.
    pub fn nullspace(&self, tol: f64) -> Vec<Vec<T>> {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        free.iter()
            .map(|&f| {
                let mut v = vec![T::zero(); self.cols];
                v[f] = T::one();
                for (row, &p) in pivots.iter().enumerate() {
                    v[p] = -r[(row, f)].clone();
                }
                v
            })
            .collect()
    }

    /// Unique solution of `A x = b`.
    ///
    /// Fails when the system is inconsistent or underdetermined.
    pub fn solve(&self, b: &[T], tol: f64) -> Result<Vec<T>> {
        if b.len() != self.rows {
            return Err(Error::dimension("right-hand side length"));
        }
        let aug = Matrix::from_fn(self.rows, self.cols + 1, |r, c| {
            if c < self.cols {
                self[(r, c)].clone()
            } else {
                b[r].clone()
            }
        });
        let (red, pivots) = aug.rref(tol);
        if pivots.contains(&self.cols) {
            return Err(Error::Singular("inconsistent system".into()));
        }
        if pivots.len() < self.cols {
            return Err(Error::Singular(format!(
                "kernel of dimension {}",
                self.cols - pivots.len()
            )));
        }
        Ok((0..self.cols).map(|r| red[(r, self.cols)].clone()).collect())
    }

    /// Inverse of a square matrix.
    pub fn inverse(&self, tol: f64) -> Result<Self> {
        if self.rows != self.cols {
            return Err(Error::dimension("inverse of a non-square matrix"));
        }
        let n = self.rows;
        let aug = Matrix::from_fn(n, 2 * n, |r, c| {
            if c < n {
                self[(r, c)].clone()
            } else if c - n == r {
                T::one()
            } else {
                T::zero()
            }
        });
        let (red, pivots) = aug.rref(tol);
        if pivots.len() < n || pivots[n - 1] >= n {
            return Err(Error::Singular("matrix is not invertible".into()));
        }
        Ok(Matrix::from_fn(n, n, |r, c| red[(r, c + n)].clone()))
    }

    /// Determinant by elimination.
    pub fn det(&self) -> Result<T> {
        if self.rows != self.cols {
            return Err(Error::dimension("determinant of a non-square matrix"));
        }
        let n = self.rows;
        let mut m = self.clone();
        let mut det = T::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !m[(r, c)].is_zero()) else {
                return Ok(T::zero());
            };
            if p != c {
                for k in 0..n {
                    m.data.swap(p * n + k, c * n + k);
                }
                det = -det;
            }
            let piv = m[(c, c)].clone();
            det = det * piv.clone();
            for r in c + 1..n {
                if m[(r, c)].is_zero() {
                    continue;
                }
                let f = m[(r, c)].clone() / piv.clone();
                for k in c..n {
                    m[(r, k)] = m[(r, k)].clone() - f.clone() * m[(c, k)].clone();
                }
            }
        }
        Ok(det)
    }
}

/// Spectral projector `Π_λ = Π_{μ≠λ} (L − μ)/(λ − μ)` of a semisimple
/// operator with known spectrum.
///
/// Fails when `lambda` is not in `spectrum` or `L` is not square.
pub fn spectral_projector<T: Field>(
    l: &Matrix<T>,
    spectrum: &[T],
    lambda: &T,
) -> Result<Matrix<T>> {
    if l.rows() != l.cols() {
        return Err(Error::dimension("spectral projector of a non-square operator"));
    }
    if !spectrum.contains(lambda) {
        return Err(Error::argument(format!("{} is not in the spectrum", lambda)));
    }
    let n = l.rows();
    let mut p = Matrix::identity(n);
    for mu in spectrum.iter().filter(|&m| m != lambda) {
        let shifted = l.sub(&Matrix::identity(n).scale(mu))?;
        let factor = T::one() / (lambda.clone() - mu.clone());
        p = p.mul(&shifted)?.scale(&factor);
    }
    Ok(p)
}

/// Euclidean dot product.
pub fn dot<T: Ring>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::QSqrt3;
    use num_traits::{One, Zero};

    type Q = QSqrt3;

    #[test]
    fn identity_has_trivial_kernel() {
        assert!(Matrix::<Q>::identity(5).nullspace(0.0).is_empty());
    }

    #[test]
    fn zero_map_has_full_kernel() {
        assert_eq!(Matrix::<Q>::zeros(2, 3).nullspace(0.0).len(), 3);
    }

    #[test]
    fn diagonal_projector() {
        let l = Matrix::diag(&[Q::from_int(7), Q::from_int(-8)]);
        let p = spectral_projector(&l, &[Q::from_int(7), Q::from_int(-8)], &Q::from_int(7)).unwrap();
        assert_eq!(p, Matrix::diag(&[Q::one(), Q::zero()]));
        assert!(spectral_projector(&l, &[Q::from_int(7), Q::from_int(-8)], &Q::from_int(1)).is_err());
    }

    #[test]
    fn singular_solve_is_an_error() {
        let a = Matrix::from_rows(vec![vec![Q::one(), Q::one()], vec![Q::one(), Q::one()]]).unwrap();
        assert!(a.solve(&[Q::one(), Q::zero()], 0.0).is_err());
        assert!(a.solve(&[Q::one(), Q::one()], 0.0).is_err());
    }

    #[test]
    fn determinant_and_inverse() {
        let a = Matrix::from_rows(vec![
            vec![Q::from_int(2), Q::sqrt3()],
            vec![Q::sqrt3(), Q::from_int(1)],
        ])
        .unwrap();
        assert_eq!(a.det().unwrap(), Q::from_int(-1));
        let inv = a.inverse(0.0).unwrap();
        assert_eq!(a.mul(&inv).unwrap(), Matrix::identity(2));
    }

    #[test]
    fn float_rank_uses_threshold() {
        let a = Matrix::from_rows(vec![vec![1.0, 1.0], vec![1.0, 1.0 + 1e-13]]).unwrap();
        assert_eq!(a.rank(1e-9), 1);
        assert_eq!(a.rank(1e-15), 2);
    }
}
