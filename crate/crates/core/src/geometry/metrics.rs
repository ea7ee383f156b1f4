use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::geometry::space::HomogeneousSpace;
use crate::linalg;
use crate::matrix::Matrix;
use crate::policy::policy;
use crate::scalar::Scalar;

fn sym_index(m: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * m - i * (i + 1) / 2 + j
}

/// Symmetric matrix with the given upper-triangular entries.
pub fn symmetric_from_upper<S: Scalar>(m: usize, upper: &[S]) -> Matrix<S> {
    Matrix::from_fn(m, m, |i, j| upper[sym_index(m, i, j)].clone())
}

/// Basis of the Ad(K)-invariant symmetric bilinear forms on the complement.
pub fn invariant_metric_space<S: Scalar>(space: &HomogeneousSpace<S>) -> Vec<Matrix<S>> {
    let m = space.dim();
    let u = m * (m + 1) / 2;
    if u == 0 {
        return vec![];
    }
    let rho = space.isotropy_action();
    let mut sys = Matrix::<S>::zeros(rho.len().max(1) * u, u);
    for (z, r) in rho.iter().enumerate() {
        for a in 0..m {
            for b in a..m {
                let row = z * u + sym_index(m, a, b);
                // (ρᵗM)[a][b] + (Mρ)[a][b]
                for k in 0..m {
                    let c = &r[(k, a)];
                    if !c.negligible(0.0) {
                        let col = sym_index(m, k, b);
                        sys[(row, col)] = sys[(row, col)].clone() + c.clone();
                    }
                    let c = &r[(k, b)];
                    if !c.negligible(0.0) {
                        let col = sym_index(m, a, k);
                        sys[(row, col)] = sys[(row, col)].clone() + c.clone();
                    }
                }
            }
        }
    }
    let ns = sys.null_space(policy().rank_gap);
    (0..ns.cols())
        .map(|c| symmetric_from_upper(m, &ns.column(c)))
        .collect()
}

/// Invariant forms orthonormalized under the Frobenius inner product.
pub fn orthonormal_invariant_forms(space: &HomogeneousSpace<f64>) -> Vec<Matrix<f64>> {
    let m = space.dim();
    let flat: Vec<Vec<f64>> = invariant_metric_space(space).iter().map(|w| w.as_slice().to_vec()).collect();
    linalg::orthonormalize(&flat, &Matrix::identity(m * m), 1e-10)
        .into_iter()
        .map(|v| Matrix::from_vec(m, m, v))
        .collect()
}

/// Gram matrix `Σ x_k W_k`.
pub fn combine<S: Scalar>(basis: &[Matrix<S>], x: &[S]) -> Matrix<S> {
    let m = basis.first().map_or(0, |b| b.rows());
    let mut g = Matrix::zeros(m, m);
    for (w, xi) in basis.iter().zip(x) {
        if !xi.negligible(0.0) {
            g = g.add(&w.scale(xi));
        }
    }
    g
}

/// Coordinates of `gram` in a Frobenius-orthonormal basis (projection for non-invariant input).
pub fn coordinates(basis: &[Matrix<f64>], gram: &Matrix<f64>) -> Vec<f64> {
    basis.iter().map(|w| w.trace_product(&gram.transpose())).collect()
}

/// A positive-definite invariant inner product on the complement (float).
///
/// Prefers the identity, then the projection of the identity onto the
/// invariant forms, then seeded random combinations.
pub fn invariant_inner_product(space: &HomogeneousSpace<f64>, seed: u64) -> Result<Matrix<f64>> {
    let m = space.dim();
    let id = Matrix::identity(m);
    if space.invariance_residual(&id) <= policy().structural {
        return Ok(id);
    }
    let basis = orthonormal_invariant_forms(space);
    if basis.is_empty() {
        return Err(Error::NoInvariantInnerProduct);
    }
    let proj = combine(&basis, &coordinates(&basis, &id));
    if proj.is_positive_definite() {
        return Ok(proj);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..500 {
        let x: Vec<f64> = (0..basis.len()).map(|_| rng.gen_range(-1.0..1.0)).collect();
        for sign in [1.0, -1.0] {
            let g = combine(&basis, &x).scale(&sign);
            if g.is_positive_definite() {
                return Ok(g);
            }
        }
    }
    Err(Error::NoInvariantInnerProduct)
}

/// Seeded random positive-definite invariant metrics, normalized to unit max entry.
pub fn random_invariant_metrics(space: &HomogeneousSpace<f64>, count: usize, seed: u64) -> Result<Vec<Matrix<f64>>> {
    let basis = orthonormal_invariant_forms(space);
    let base = invariant_inner_product(space, seed)?;
    let x0 = coordinates(&basis, &base);
    let mut rng = ChaCha8Rng::seed_from_u64(seed.wrapping_add(1));
    let mut out = Vec::with_capacity(count);
    let mut attempts = 0;
    while out.len() < count {
        attempts += 1;
        if attempts > 200 * count + 1000 {
            return Err(Error::Numeric("could not sample positive-definite invariant metrics".into()));
        }
        let scale = 2f64.powf(rng.gen_range(-2.0..2.0));
        let x: Vec<f64> = x0.iter().map(|v| v * scale + rng.gen_range(-1.5..1.5)).collect();
        let g = combine(&basis, &x);
        if g.is_positive_definite() {
            let n = g.max_abs();
            out.push(g.scale(&(1.0 / n)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;
    use crate::scalar::{rat, Rational};

    #[test]
    fn lie_group_has_all_symmetric_forms() {
        let g = HomogeneousSpace::lie_group("H3", LieAlgebra::<Rational>::heisenberg());
        assert_eq!(invariant_metric_space(&g).len(), 6);
    }

    #[test]
    fn rotation_isotropy_forces_conformal_block() {
        // so(2) ⋉ ℝ²: isotropy rotates the plane.
        let a = LieAlgebra::from_brackets(
            vec!["k".into(), "x".into(), "y".into()],
            &[(0, 1, vec![(2, rat(1, 1))]), (0, 2, vec![(1, rat(-1, 1))])],
        )
        .unwrap();
        let s = HomogeneousSpace::new("E2", a, vec![0], vec![1, 2]).unwrap();
        let basis = invariant_metric_space(&s);
        assert_eq!(basis.len(), 1);
        assert_eq!(basis[0][(0, 1)], rat(0, 1));
        assert_eq!(basis[0][(0, 0)], basis[0][(1, 1)]);
        let f = s.to_f64();
        let ms = random_invariant_metrics(&f, 5, 3).unwrap();
        for g in ms {
            assert!(f.invariance_residual(&g) < 1e-12);
        }
    }
}
