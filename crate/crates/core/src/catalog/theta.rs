//! θ-data of the two catalog rows extended by an abelian nilradical.

use crate::catalog::Case;
use crate::error::{Error, Result};
use crate::geometry::InvariantMetric;
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::scalar::{Rational, Scalar};
use crate::structure::StructureData;

/// `u ⋉ ℝ^k` for a θ row, with the standard metric on `ℝ^k` and `gram` on `U/K`.
///
/// Sl₂(ℂ)/U(1) acts on `ℂ² = ℝ⁴` tautologically; the Δ₁,₁ row acts by
/// `(0, id)` on `ℝ²` through the second sl₂(ℝ) factor.
pub fn theta_structure(case: &Case, gram: Matrix<Rational>) -> Result<StructureData<Rational>> {
    let images: Vec<Matrix<Rational>> = match case.record.name.as_str() {
        "Sl2C/U1-theta" => case.matrices.clone(),
        "Sl2RxSl2R/D11-theta" => case.matrices.iter().map(|m| m.submatrix(&[2, 3], &[2, 3])).collect(),
        other => return Err(Error::Premise(format!("{other} carries no θ-data"))),
    };
    let k = images[0].rows();
    let u = case.space.algebra();
    let n = u.dim();
    let g1 = (0..n).map(|i| (0..n).map(|j| if i == j { Rational::one() } else { Rational::zero() }).collect()).collect();
    let metric = InvariantMetric::new(&case.space, gram)?;
    StructureData::new(case.space.clone(), metric, LieAlgebra::abelian(k), images, Matrix::identity(k), g1, vec![])
}
