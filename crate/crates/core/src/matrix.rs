//! Dense matrices over any [`Scalar`] backend.

use std::fmt;
use std::ops::{Index, IndexMut};

use crate::error::{Error, Result};
use crate::scalar::{RealScalar, Scalar};

#[derive(Clone, PartialEq)]
pub struct Matrix<S> {
    rows: usize,
    cols: usize,
    data: Vec<S>,
}

/// Serializes as an array of rows.
impl<S: Scalar> serde::Serialize for Matrix<S> {
    fn serialize<Ser: serde::Serializer>(&self, ser: Ser) -> std::result::Result<Ser::Ok, Ser::Error> {
        let rows: Vec<Vec<serde_json::Value>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_json()).collect()).collect();
        rows.serialize(ser)
    }
}

impl<S: fmt::Debug> fmt::Debug for Matrix<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Matrix {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            write!(f, "  ")?;
            for j in 0..self.cols {
                write!(f, "{:?} ", self.data[i * self.cols + j])?;
            }
            writeln!(f)?;
        }
        write!(f, "]")
    }
}

impl<S> Index<(usize, usize)> for Matrix<S> {
    type Output = S;
    fn index(&self, (i, j): (usize, usize)) -> &S {
        debug_assert!(i < self.rows && j < self.cols);
        &self.data[i * self.cols + j]
    }
}

impl<S> IndexMut<(usize, usize)> for Matrix<S> {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        debug_assert!(i < self.rows && j < self.cols);
        &mut self.data[i * self.cols + j]
    }
}

impl<S> Matrix<S> {
    pub fn rows(&self) -> usize {
        self.rows
    }
    pub fn cols(&self) -> usize {
        self.cols
    }
    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }
    pub fn as_slice(&self) -> &[S] {
        &self.data
    }
}

impl<S: Scalar> Matrix<S> {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Matrix {
            rows,
            cols,
            data: vec![S::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = S::one();
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> S) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Matrix { rows, cols, data }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<S>) -> Self {
        assert_eq!(data.len(), rows * cols, "matrix data length");
        Matrix { rows, cols, data }
    }

    pub fn from_rows(rows: &[Vec<S>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |v| v.len());
        assert!(rows.iter().all(|v| v.len() == c), "ragged rows");
        Matrix {
            rows: r,
            cols: c,
            data: rows.iter().flat_map(|v| v.iter().cloned()).collect(),
        }
    }

    /// Matrix whose columns are the given vectors.
    pub fn from_columns(cols: &[Vec<S>], rows: usize) -> Self {
        Self::from_fn(rows, cols.len(), |i, j| cols[j][i].clone())
    }

    pub fn diagonal(d: &[S]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn row(&self, i: usize) -> Vec<S> {
        self.data[i * self.cols..(i + 1) * self.cols].to_vec()
    }

    pub fn column(&self, j: usize) -> Vec<S> {
        (0..self.rows).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn columns(&self) -> Vec<Vec<S>> {
        (0..self.cols).map(|j| self.column(j)).collect()
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> Matrix<T> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> Matrix<f64> {
        self.map(|x| x.to_f64())
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].clone())
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "matrix product shape");
        let mut out = Self::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.negligible(0.0) {
                    continue;
                }
                for j in 0..o.cols {
                    let prod = a.clone() * o[(k, j)].clone();
                    let cur = std::mem::replace(&mut out[(i, j)], S::zero());
                    out[(i, j)] = cur + prod;
                }
            }
        }
        out
    }

    pub fn mul_vec(&self, v: &[S]) -> Vec<S> {
        assert_eq!(self.cols, v.len(), "matrix-vector shape");
        (0..self.rows)
            .map(|i| {
                let mut acc = S::zero();
                for (j, x) in v.iter().enumerate() {
                    acc = acc + self[(i, j)].clone() * x.clone();
                }
                acc
            })
            .collect()
    }

    pub fn add(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() + b.clone())
                .collect(),
        }
    }

    pub fn sub(&self, o: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (o.rows, o.cols));
        Matrix {
            rows: self.rows,
            cols: self.cols,
            data: self
                .data
                .iter()
                .zip(&o.data)
                .map(|(a, b)| a.clone() - b.clone())
                .collect(),
        }
    }

    pub fn scale(&self, s: &S) -> Self {
        self.map(|x| x.clone() * s.clone())
    }

    /// `self * o - o * self`.
    pub fn commutator(&self, o: &Self) -> Self {
        self.mul(o).sub(&o.mul(self))
    }

    pub fn trace(&self) -> S {
        let mut t = S::zero();
        for i in 0..self.rows.min(self.cols) {
            t = t + self[(i, i)].clone();
        }
        t
    }

    /// `tr(self * o)` without forming the product.
    pub fn trace_product(&self, o: &Self) -> S {
        assert_eq!((self.cols, self.rows), (o.rows, o.cols));
        let mut t = S::zero();
        for i in 0..self.rows {
            for k in 0..self.cols {
                t = t + self[(i, k)].clone() * o[(k, i)].clone();
            }
        }
        t
    }

    pub fn symmetrize(&self) -> Self {
        let half = S::from_ratio(1, 2);
        self.add(&self.transpose()).scale(&half)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|x| x.magnitude()).fold(0.0, f64::max)
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.data.iter().all(|x| x.negligible(tol))
    }

    pub fn submatrix(&self, rows: &[usize], cols: &[usize]) -> Self {
        Self::from_fn(rows.len(), cols.len(), |i, j| self[(rows[i], cols[j])].clone())
    }

    /// Stack matrices vertically.
    pub fn vstack(blocks: &[Self]) -> Self {
        let cols = blocks.first().map_or(0, |b| b.cols);
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            assert_eq!(b.cols, cols, "vstack column mismatch");
            rows += b.rows;
            data.extend(b.data.iter().cloned());
        }
        Matrix { rows, cols, data }
    }

    pub fn hstack(blocks: &[Self]) -> Self {
        let rows = blocks.first().map_or(0, |b| b.rows);
        let cols: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut off = 0;
        for b in blocks {
            assert_eq!(b.rows, rows, "hstack row mismatch");
            for i in 0..rows {
                for j in 0..b.cols {
                    out[(i, off + j)] = b[(i, j)].clone();
                }
            }
            off += b.cols;
        }
        out
    }

    /// Block-diagonal sum.
    pub fn block_diag(blocks: &[Self]) -> Self {
        let r: usize = blocks.iter().map(|b| b.rows).sum();
        let c: usize = blocks.iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(r, c);
        let (mut ro, mut co) = (0, 0);
        for b in blocks {
            for i in 0..b.rows {
                for j in 0..b.cols {
                    out[(ro + i, co + j)] = b[(i, j)].clone();
                }
            }
            ro += b.rows;
            co += b.cols;
        }
        out
    }

    /// Reduced row echelon form; returns (rref, pivot columns).
    pub fn rref(&self, tol: f64) -> (Self, Vec<usize>) {
        let mut m = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        let scale = if S::EXACT { 1.0 } else { self.max_abs().max(1.0) };
        for c in 0..m.cols {
            if r == m.rows {
                break;
            }
            let (best, mag) = (r..m.rows)
                .map(|i| (i, m[(i, c)].magnitude()))
                .fold((r, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if mag == 0.0 || m[(best, c)].negligible(tol * scale) {
                continue;
            }
            m.swap_rows(r, best);
            let inv = S::one() / m[(r, c)].clone();
            for j in 0..m.cols {
                let v = m[(r, j)].clone() * inv.clone();
                m[(r, j)] = v;
            }
            for i in 0..m.rows {
                if i == r {
                    continue;
                }
                let f = m[(i, c)].clone();
                if f.negligible(0.0) {
                    continue;
                }
                for j in 0..m.cols {
                    let v = m[(i, j)].clone() - f.clone() * m[(r, j)].clone();
                    m[(i, j)] = v;
                }
            }
            pivots.push(c);
            r += 1;
        }
        (m, pivots)
    }

    pub fn rank(&self, tol: f64) -> usize {
        self.rref(tol).1.len()
    }

    /// Null space by elimination; columns of the result form a basis.
    pub fn null_space_rref(&self, tol: f64) -> Self {
        let (r, pivots) = self.rref(tol);
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut out = Self::zeros(self.cols, free.len());
        for (k, &f) in free.iter().enumerate() {
            out[(f, k)] = S::one();
            for (pi, &pc) in pivots.iter().enumerate() {
                out[(pc, k)] = -r[(pi, f)].clone();
            }
        }
        out
    }

    /// Backend-appropriate null space (exact elimination or SVD).
    pub fn null_space(&self, tol: f64) -> Self {
        S::null_space(self, tol)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a == b {
            return;
        }
        for j in 0..self.cols {
            self.data.swap(a * self.cols + j, b * self.cols + j);
        }
    }

    /// Gauss–Jordan inverse with partial pivoting.
    pub fn inverse(&self) -> Result<Self> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch {
                expected: self.rows,
                found: self.cols,
            });
        }
        let n = self.rows;
        let aug = Self::hstack(&[self.clone(), Self::identity(n)]);
        let (r, piv) = aug.rref(1e-14);
        if piv.len() < n || piv[n - 1] != n - 1 {
            return Err(Error::Singular);
        }
        Ok(Self::from_fn(n, n, |i, j| r[(i, n + j)].clone()))
    }

    /// Solve `self * X = rhs`.
    pub fn solve(&self, rhs: &Self) -> Result<Self> {
        Ok(self.inverse()?.mul(rhs))
    }

    pub fn determinant(&self) -> S {
        assert!(self.is_square());
        let mut m = self.clone();
        let n = self.rows;
        let mut det = S::one();
        for c in 0..n {
            let best = (c..n)
                .max_by(|&a, &b| m[(a, c)].magnitude().total_cmp(&m[(b, c)].magnitude()))
                .unwrap();
            if m[(best, c)].negligible(0.0) {
                return S::zero();
            }
            if best != c {
                m.swap_rows(best, c);
                det = -det;
            }
            let p = m[(c, c)].clone();
            det = det * p.clone();
            for i in c + 1..n {
                let f = m[(i, c)].clone() / p.clone();
                if f.negligible(0.0) {
                    continue;
                }
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        det
    }

    /// Positive-definiteness via an unpivoted LDLᵀ (all pivots positive).
    pub fn is_positive_definite(&self) -> bool {
        if !self.is_square() {
            return false;
        }
        let n = self.rows;
        let mut m = self.symmetrize();
        for c in 0..n {
            let p = m[(c, c)].clone();
            if !p.is_positive() || (!S::EXACT && p.to_f64() <= 1e-300) {
                return false;
            }
            for i in c + 1..n {
                let f = m[(i, c)].clone() / p.clone();
                for j in c..n {
                    let v = m[(i, j)].clone() - f.clone() * m[(c, j)].clone();
                    m[(i, j)] = v;
                }
            }
        }
        true
    }

    /// Symmetric `self` as a column of its upper-triangular entries.
    pub fn upper_entries(&self) -> Vec<S> {
        let mut v = Vec::new();
        for i in 0..self.rows {
            for j in i..self.cols {
                v.push(self[(i, j)].clone());
            }
        }
        v
    }
}

impl<S: RealScalar> Matrix<S> {
    /// Lower-triangular Cholesky factor `L` with `self = L Lᵀ`.
    pub fn cholesky(&self) -> Result<Self> {
        let n = self.rows;
        let mut l = Self::zeros(n, n);
        for j in 0..n {
            let mut d = self[(j, j)].clone();
            for k in 0..j {
                d = d - l[(j, k)].clone() * l[(j, k)].clone();
            }
            if d.to_f64().is_nan() || d.to_f64() <= 0.0 {
                return Err(Error::NotPositiveDefinite);
            }
            let s = d.sqrt();
            l[(j, j)] = s.clone();
            for i in j + 1..n {
                let mut v = self[(i, j)].clone();
                for k in 0..j {
                    v = v - l[(i, k)].clone() * l[(j, k)].clone();
                }
                l[(i, j)] = v / s.clone();
            }
        }
        Ok(l)
    }

    /// Inverse of a lower-triangular matrix by forward substitution.
    pub fn lower_inverse(&self) -> Self {
        let n = self.rows;
        let mut inv = Self::zeros(n, n);
        for j in 0..n {
            inv[(j, j)] = S::one() / self[(j, j)].clone();
            for i in j + 1..n {
                let mut acc = S::zero();
                for k in j..i {
                    acc = acc + self[(i, k)].clone() * inv[(k, j)].clone();
                }
                inv[(i, j)] = -acc / self[(i, i)].clone();
            }
        }
        inv
    }

    /// Orthonormal frame `F = L⁻ᵀ` for the inner product `self`, so `Fᵀ self F = I`.
    pub fn orthonormal_frame(&self) -> Result<Self> {
        Ok(self.cholesky()?.lower_inverse().transpose())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn exact_inverse_and_null_space() {
        let m = Matrix::from_rows(&[
            vec![rat(2, 1), rat(1, 1)],
            vec![rat(1, 1), rat(1, 1)],
        ]);
        let inv = m.inverse().unwrap();
        assert_eq!(m.mul(&inv), Matrix::<Rational>::identity(2));
        let s = Matrix::from_rows(&[vec![rat(1, 1), rat(2, 1), rat(3, 1)]]);
        let ns = s.null_space(0.0);
        assert_eq!(ns.cols(), 2);
        assert!(s.mul(&ns).is_zero(0.0));
        assert_eq!(m.determinant(), rat(1, 1));
    }

    #[test]
    fn float_null_space_and_cholesky() {
        let s = Matrix::from_rows(&[vec![1.0, 2.0, 3.0], vec![2.0, 4.0, 6.0]]);
        let ns = s.null_space(1e-8);
        assert_eq!(ns.cols(), 2);
        assert!(s.mul(&ns).max_abs() < 1e-12);
        let g = Matrix::from_rows(&[vec![4.0, 1.0], vec![1.0, 3.0]]);
        let f = g.orthonormal_frame().unwrap();
        let e = f.transpose().mul(&g).mul(&f).sub(&Matrix::identity(2));
        assert!(e.max_abs() < 1e-14);
        assert!(g.is_positive_definite());
        assert!(!Matrix::from_rows(&[vec![1.0, 2.0], vec![2.0, 1.0]]).is_positive_definite());
    }
}
