//! Floating-point linear algebra delegated to nalgebra.

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub fn to_na(m: &Matrix<f64>) -> DMatrix<f64> {
    DMatrix::from_row_slice(m.rows(), m.cols(), m.as_slice())
}

pub fn from_na(m: &DMatrix<f64>) -> Matrix<f64> {
    Matrix::from_fn(m.nrows(), m.ncols(), |i, j| m[(i, j)])
}

/// Null space by SVD; singular values below `gap · σ_max` count as zero.
pub fn svd_null_space(m: &Matrix<f64>, gap: f64) -> Matrix<f64> {
    let n = m.cols();
    if n == 0 {
        return Matrix::zeros(0, 0);
    }
    let smax = m.max_abs();
    if smax == 0.0 {
        return Matrix::identity(n);
    }
    let mut a = to_na(m);
    if a.nrows() < n {
        a = a.resize_vertically(n, 0.0);
    }
    let svd = a.svd(false, true);
    let vt = svd.v_t.expect("v_t requested");
    let sv = &svd.singular_values;
    let top = sv.iter().cloned().fold(0.0, f64::max);
    let cols: Vec<Vec<f64>> = (0..sv.len())
        .filter(|&i| sv[i] <= gap * top)
        .map(|i| vt.row(i).iter().cloned().collect())
        .collect();
    Matrix::from_columns(&cols, n)
}

/// Numerical rank with the same singular-value gap rule.
pub fn rank(m: &Matrix<f64>, gap: f64) -> usize {
    m.cols() - svd_null_space(m, gap).cols()
}

/// Eigen-decomposition of a symmetric matrix, eigenvalues ascending.
pub fn sym_eigen(m: &Matrix<f64>) -> (Vec<f64>, Matrix<f64>) {
    let n = m.rows();
    let eig = SymmetricEigen::new(to_na(&m.symmetrize()));
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let vals = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = Matrix::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (vals, vecs)
}

/// Solve the generalized problem `A v = λ G v` for symmetric `A` and PD `G`.
/// Returned eigenvectors are `G`-orthonormal columns.
pub fn sym_eigen_generalized(a: &Matrix<f64>, g: &Matrix<f64>) -> Result<(Vec<f64>, Matrix<f64>)> {
    let f = g.orthonormal_frame()?;
    let reduced = f.transpose().mul(a).mul(&f);
    let (vals, vecs) = sym_eigen(&reduced);
    Ok((vals, f.mul(&vecs)))
}

/// Matrix exponential.
pub fn expm(m: &Matrix<f64>) -> Matrix<f64> {
    from_na(&to_na(m).exp())
}

/// Moore–Penrose least-squares solution of `a x = b` (columns of `b`).
pub fn least_squares(a: &Matrix<f64>, b: &Matrix<f64>) -> Result<Matrix<f64>> {
    let svd = to_na(a).svd(true, true);
    let x = svd
        .solve(&to_na(b), 1e-12 * a.max_abs().max(1.0))
        .map_err(|e| Error::Numeric(e.to_string()))?;
    Ok(from_na(&x))
}

/// Gram–Schmidt orthonormalization of vectors under the inner product `g`.
/// Vectors that become negligible are dropped.
pub fn orthonormalize(vectors: &[Vec<f64>], g: &Matrix<f64>, tol: f64) -> Vec<Vec<f64>> {
    let ip = |a: &[f64], b: &[f64]| -> f64 {
        let gb = g.mul_vec(b);
        a.iter().zip(&gb).map(|(x, y)| x * y).sum()
    };
    let mut out: Vec<Vec<f64>> = Vec::new();
    for v in vectors {
        let mut w = v.clone();
        for _ in 0..2 {
            for u in &out {
                let c = ip(&w, u);
                for (wi, ui) in w.iter_mut().zip(u) {
                    *wi -= c * ui;
                }
            }
        }
        let n = ip(&w, &w).max(0.0).sqrt();
        let scale = ip(v, v).max(0.0).sqrt().max(1e-300);
        if n > tol * scale {
            out.push(w.iter().map(|x| x / n).collect());
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn eigen_sorted_and_generalized() {
        let a = Matrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]]);
        let (vals, _) = sym_eigen(&a);
        assert!((vals[0] - 1.0).abs() < 1e-14 && (vals[1] - 3.0).abs() < 1e-14);
        let g = Matrix::diagonal(&[1.0, 4.0]);
        let (gv, vecs) = sym_eigen_generalized(&a, &g).unwrap();
        for k in 0..2 {
            let v = vecs.column(k);
            let lhs = a.mul_vec(&v);
            let rhs = g.mul_vec(&v);
            for i in 0..2 {
                assert!((lhs[i] - gv[k] * rhs[i]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn exponential_of_rotation() {
        let t = 0.3f64;
        let m = Matrix::from_rows(&[vec![0.0, -t], vec![t, 0.0]]);
        let e = expm(&m);
        assert!((e[(0, 0)] - t.cos()).abs() < 1e-14);
        assert!((e[(1, 0)] - t.sin()).abs() < 1e-14);
    }
}
