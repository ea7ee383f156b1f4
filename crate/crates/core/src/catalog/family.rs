//! Reduced metric families `⟨·,·⟩_h = ⟨h·, h·⟩₀` and the closed forms attached to them.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Rows with an "up to isometry" parameterization by `(a, b, d, e)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum MetricFamily {
    /// Sl₂(ℂ)/U(1): `d` couples `p₁` to `q₁` through a rotation.
    Sl2cU1,
    /// (Sl₂(ℝ)×Sl₂(ℝ))/Δ₁,₁SO(2): `d` couples the two sl₂(ℝ) blocks diagonally.
    Sl2r2D11,
}

/// Family coded for a catalog row, if any.
pub fn metric_family(name: &str) -> Result<MetricFamily> {
    match name {
        "Sl2C/U1" | "Sl2C/U1-theta" => Ok(MetricFamily::Sl2cU1),
        "Sl2RxSl2R/D11-theta" | "Sl2CxSl2R-case-516" => Ok(MetricFamily::Sl2r2D11),
        _ => Err(Error::Premise(format!("no reduced metric family is coded for {name}"))),
    }
}

impl MetricFamily {
    /// The lower-triangular `h` in the row's ordered complement basis.
    pub fn h<S: Scalar>(self, a: &S, b: &S, d: &S, e: &S) -> Result<Matrix<S>> {
        for (name, v) in [("a", a), ("b", b), ("e", e)] {
            if v.negligible(0.0) {
                return Err(Error::ParamConstraint(format!("{name} must be nonzero")));
            }
        }
        let mut h = Matrix::zeros(5, 5);
        h[(0, 0)] = e.clone();
        h[(1, 1)] = a.clone();
        h[(2, 2)] = a.clone();
        h[(3, 3)] = b.clone();
        h[(4, 4)] = b.clone();
        match self {
            MetricFamily::Sl2cU1 => {
                h[(3, 2)] = S::zero() - d.clone();
                h[(4, 1)] = d.clone();
            }
            MetricFamily::Sl2r2D11 => {
                h[(3, 1)] = d.clone();
                h[(4, 2)] = d.clone();
            }
        }
        Ok(h)
    }

    /// `hᵗh`, the Gram matrix of `⟨·,·⟩_h` in the stored basis.
    pub fn gram<S: Scalar>(self, a: &S, b: &S, d: &S, e: &S) -> Result<Matrix<S>> {
        let h = self.h(a, b, d, e)?;
        Ok(h.transpose().mul(&h))
    }

    /// Columns `h⁻¹ e_i`, an orthonormal frame for `⟨·,·⟩_h`.
    pub fn frame<S: Scalar>(self, a: &S, b: &S, d: &S, e: &S) -> Result<Matrix<S>> {
        self.h(a, b, d, e)?.inverse()
    }
}

/// `4d((a²−e²)² + a²(b²+d²)) / (a³b²e²)`, the off-diagonal entry `Ric(h⁻¹Y₁, h⁻¹X₂)` on Sl₂(ℂ)/U(1).
pub fn offdiagonal_entry_formula<S: Scalar>(a: &S, b: &S, d: &S, e: &S) -> S {
    let (a2, b2, d2, e2) = (a.clone() * a.clone(), b.clone() * b.clone(), d.clone() * d.clone(), e.clone() * e.clone());
    let t = a2.clone() - e2.clone();
    let num = S::from_i64(4) * d.clone() * (t.clone() * t + a2.clone() * (b2.clone() + d2));
    num / (a2 * a.clone() * b2 * e2)
}

/// The displayed closed form for `r^θ₁₁` on the Δ₁,₁ family (valid when `det h = 1`).
pub fn displayed_r11<S: Scalar>(a: &S, b: &S, d: &S, e: &S) -> S {
    let (a2, b2, d2, e2) = sq4(a, b, d, e);
    let t = b2.clone() - d2.clone();
    let four_b2 = S::from_i64(4) * b2;
    S::from_ratio(1, 2) * (a2.clone() * a2.clone() * e2.clone() * e2.clone() + t.clone() * t)
        + a2 * d2 * (e2.clone() - four_b2.clone()) * (e2 + four_b2)
}

/// The displayed closed form for `r^θ₁₁ + 2r^θ₄₄ + 2(a/d) r^θ₂₄` (valid when `det h = 1`).
pub fn displayed_combination<S: Scalar>(a: &S, b: &S, d: &S, e: &S) -> S {
    let (a2, b2, d2, e2) = sq4(a, b, d, e);
    let t = a2.clone() - b2.clone() + d2;
    S::from_ratio(1, 2) * t.clone() * t * e2.clone() * e2.clone()
        + S::from_i64(4) * a2.clone() * a2 * b2.clone() * (S::from_i64(4) * b2 - e2)
}

/// Closed form of `r^θ₁₁` obtained from the structure constants (valid when `det h = 1`).
pub fn computed_r11<S: Scalar>(a: &S, b: &S, d: &S, e: &S) -> S {
    let (a2, b2, d2, e2) = sq4(a, b, d, e);
    let t = b2.clone() - d2.clone();
    let e4 = e2.clone() * e2.clone();
    let four_b2 = S::from_i64(4) * b2;
    S::from_ratio(1, 2) * (a2.clone() * a2.clone() + t.clone() * t) * e4
        + a2 * d2 * (e2.clone() - four_b2.clone()) * (e2 + four_b2)
}

/// Closed form of the combination obtained from the structure constants (valid when `det h = 1`).
pub fn computed_combination<S: Scalar>(a: &S, b: &S, d: &S, e: &S) -> S {
    let (a2, b2, d2, e2) = sq4(a, b, d, e);
    let t = a2.clone() - b2.clone() + d2;
    S::from_ratio(1, 2) * t.clone() * t * e2.clone() * e2
        + S::from_i64(16) * a2.clone() * a2 * b2.clone() * b2
}

fn sq4<S: Scalar>(a: &S, b: &S, d: &S, e: &S) -> (S, S, S, S) {
    (a.clone() * a.clone(), b.clone() * b.clone(), d.clone() * d.clone(), e.clone() * e.clone())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn unit_parameters_give_identity() {
        let one = rat(1, 1);
        let g = MetricFamily::Sl2cU1.gram(&one, &one, &rat(0, 1), &one).unwrap();
        assert_eq!(g, Matrix::<Rational>::identity(5));
    }

    #[test]
    fn zero_scale_is_rejected() {
        let one = 1.0f64;
        assert!(MetricFamily::Sl2r2D11.h(&0.0, &one, &one, &one).is_err());
    }

    #[test]
    fn entry_formula_at_unit_point() {
        let one = rat(1, 1);
        assert_eq!(offdiagonal_entry_formula(&one, &one, &one, &one), rat(8, 1));
    }
}
