use crate::error::{Error, Result};
use crate::lie::algebra::{span_basis, LieAlgebra};
use crate::matrix::Matrix;
use crate::policy::policy;
use crate::scalar::Scalar;

/// A subalgebra given by spanning coordinate vectors in the parent basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Subalgebra<S> {
    span: Vec<Vec<S>>,
}

impl<S: Scalar> Subalgebra<S> {
    pub fn new(parent: &LieAlgebra<S>, span: Vec<Vec<S>>) -> Result<Self> {
        let n = parent.dim();
        for v in &span {
            if v.len() != n {
                return Err(Error::DimensionMismatch { expected: n, found: v.len() });
            }
        }
        if span_basis(&span, n).len() != span.len() {
            return Err(Error::Premise("spanning vectors are linearly dependent".into()));
        }
        let residual = parent.closure_residual(&span);
        if residual > policy().structural {
            return Err(Error::NotSubalgebra { residual });
        }
        Ok(Subalgebra { span })
    }

    /// Subalgebra spanned by a subset of the basis.
    pub fn from_indices(parent: &LieAlgebra<S>, idx: &[usize]) -> Result<Self> {
        let n = parent.dim();
        let span = idx
            .iter()
            .map(|&i| (0..n).map(|k| if k == i { S::one() } else { S::zero() }).collect())
            .collect();
        Self::new(parent, span)
    }

    pub fn span(&self) -> &[Vec<S>] {
        &self.span
    }

    pub fn dim(&self) -> usize {
        self.span.len()
    }
}

/// A representation `ρ: g → gl(V)` given by the images of basis vectors.
#[derive(Clone, Debug, PartialEq)]
pub struct Representation<S> {
    source: LieAlgebra<S>,
    images: Vec<Matrix<S>>,
}

impl<S: Scalar> Representation<S> {
    pub fn new(source: LieAlgebra<S>, images: Vec<Matrix<S>>) -> Result<Self> {
        if images.len() != source.dim() {
            return Err(Error::DimensionMismatch { expected: source.dim(), found: images.len() });
        }
        let d = images.first().map_or(0, |m| m.rows());
        for m in &images {
            if m.rows() != d || m.cols() != d {
                return Err(Error::DimensionMismatch { expected: d, found: m.rows().max(m.cols()) });
            }
        }
        let r = Representation { source, images };
        let residual = r.homomorphism_residual();
        if residual > if S::EXACT { 0.0 } else { policy().structural } {
            return Err(Error::NotHomomorphism { residual });
        }
        Ok(r)
    }

    pub fn zero(source: LieAlgebra<S>, target_dim: usize) -> Self {
        let images = vec![Matrix::zeros(target_dim, target_dim); source.dim()];
        Representation { source, images }
    }

    pub fn source(&self) -> &LieAlgebra<S> {
        &self.source
    }

    pub fn target_dim(&self) -> usize {
        self.images.first().map_or(0, |m| m.rows())
    }

    pub fn images(&self) -> &[Matrix<S>] {
        &self.images
    }

    pub fn image(&self, x: &[S]) -> Matrix<S> {
        let d = self.target_dim();
        let mut m = Matrix::zeros(d, d);
        for (xi, img) in x.iter().zip(&self.images) {
            if !xi.negligible(0.0) {
                m = m.add(&img.scale(xi));
            }
        }
        m
    }

    pub fn homomorphism_residual(&self) -> f64 {
        let n = self.source.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let lhs = self.image(&self.source.bracket_basis(i, j));
                let rhs = self.images[i].commutator(&self.images[j]);
                worst = worst.max(lhs.sub(&rhs).max_abs());
            }
        }
        worst
    }

    pub fn to_f64(&self) -> Representation<f64> {
        Representation {
            source: self.source.to_f64(),
            images: self.images.iter().map(|m| m.to_f64()).collect(),
        }
    }
}

/// `g = u ⋉_θ n`, basis ordered as the basis of `u` followed by the basis of `n`.
#[derive(Clone, Debug, PartialEq)]
pub struct SemidirectProduct<S> {
    pub reductive: LieAlgebra<S>,
    pub nil: LieAlgebra<S>,
    pub action: Representation<S>,
    pub total: LieAlgebra<S>,
}

pub fn semidirect<S: Scalar>(u: &LieAlgebra<S>, n: &LieAlgebra<S>, theta: &Representation<S>) -> Result<SemidirectProduct<S>> {
    if theta.source() != u {
        return Err(Error::Premise("action source differs from the reductive part".into()));
    }
    if theta.target_dim() != n.dim() {
        return Err(Error::DimensionMismatch { expected: n.dim(), found: theta.target_dim() });
    }
    if !n.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let tol = if S::EXACT { 0.0 } else { policy().structural };
    for (index, img) in theta.images().iter().enumerate() {
        let residual = n.derivation_residual(img);
        if residual > tol {
            return Err(Error::NotDerivation { index, residual });
        }
    }
    let (a, b) = (u.dim(), n.dim());
    let dim = a + b;
    let mut c = vec![S::zero(); dim * dim * dim];
    let idx = |i: usize, j: usize, k: usize| (i * dim + j) * dim + k;
    for i in 0..a {
        for j in 0..a {
            for k in 0..a {
                c[idx(i, j, k)] = u.c(i, j, k).clone();
            }
        }
        for x in 0..b {
            for k in 0..b {
                let v = theta.images()[i][(k, x)].clone();
                c[idx(i, a + x, a + k)] = v.clone();
                c[idx(a + x, i, a + k)] = -v;
            }
        }
    }
    for x in 0..b {
        for y in 0..b {
            for k in 0..b {
                c[idx(a + x, a + y, a + k)] = n.c(x, y, k).clone();
            }
        }
    }
    let mut labels = u.labels().to_vec();
    labels.extend(n.labels().iter().cloned());
    let total = LieAlgebra::new(labels, c)?;
    Ok(SemidirectProduct {
        reductive: u.clone(),
        nil: n.clone(),
        action: theta.clone(),
        total,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn scalar_action_on_plane() {
        let u = LieAlgebra::<Rational>::abelian(1);
        let n = LieAlgebra::<Rational>::abelian(2);
        let theta = Representation::new(u.clone(), vec![Matrix::identity(2)]).unwrap();
        let sd = semidirect(&u, &n, &theta).unwrap();
        assert_eq!(sd.total.bracket_basis(0, 1), vec![rat(0, 1), rat(1, 1), rat(0, 1)]);
        assert_eq!(sd.total.bracket_basis(0, 2), vec![rat(0, 1), rat(0, 1), rat(1, 1)]);
        assert_eq!(sd.total.bracket_basis(1, 2), vec![rat(0, 1); 3]);
    }

    #[test]
    fn non_derivation_is_rejected() {
        let u = LieAlgebra::<Rational>::abelian(1);
        let n = LieAlgebra::<Rational>::heisenberg();
        // Identity is not a derivation of the Heisenberg algebra.
        let theta = Representation::new(u.clone(), vec![Matrix::identity(3)]).unwrap();
        match semidirect(&u, &n, &theta) {
            Err(Error::NotDerivation { index, residual }) => {
                assert_eq!(index, 0);
                assert!(residual > 0.5);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn zero_action_is_direct_sum() {
        let u = LieAlgebra::<Rational>::heisenberg();
        let n = LieAlgebra::<Rational>::abelian(2);
        let sd = semidirect(&u, &n, &Representation::zero(u.clone(), 2)).unwrap();
        assert_eq!(sd.total, u.direct_sum(&n));
    }

    #[test]
    fn subalgebra_closure() {
        let h = LieAlgebra::<Rational>::heisenberg();
        assert!(Subalgebra::from_indices(&h, &[0, 2]).is_ok());
        assert!(Subalgebra::from_indices(&h, &[0, 1]).is_err());
    }
}
