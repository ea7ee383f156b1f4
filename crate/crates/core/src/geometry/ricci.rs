use crate::error::{Error, Result};
use crate::geometry::space::{HomogeneousSpace, InvariantMetric};
use crate::matrix::Matrix;
use crate::policy::policy;
use crate::scalar::Scalar;

/// Ricci form of a validated invariant metric, as a matrix in the complement basis.
pub fn ricci<S: Scalar>(space: &HomogeneousSpace<S>, metric: &InvariantMetric<S>) -> Result<Matrix<S>> {
    ricci_form(space, metric.gram())
}

/// Ricci form for any symmetric positive definite Gram matrix.
///
/// Invariance is not checked, so callers differentiating through the
/// formula can pass dual-number entries.
pub fn ricci_form<S: Scalar>(space: &HomogeneousSpace<S>, gram: &Matrix<S>) -> Result<Matrix<S>> {
    let m = space.dim();
    if gram.rows() != m || gram.cols() != m {
        return Err(Error::DimensionMismatch { expected: m, found: gram.rows() });
    }
    if m == 0 {
        return Ok(Matrix::zeros(0, 0));
    }
    let p = gram.inverse().map_err(|_| Error::NotPositiveDefinite)?;
    let ads: Vec<Matrix<S>> = (0..m).map(|a| space.ad_m(a)).collect();
    let ga: Vec<Matrix<S>> = ads.iter().map(|ad| gram.mul(ad)).collect();
    let ap: Vec<Matrix<S>> = ads.iter().map(|ad| ad.mul(&p)).collect();
    // D^a_{kl} = <[e_k, e_l]_m, e_a>
    let d: Vec<Matrix<S>> = (0..m)
        .map(|a| {
            Matrix::from_fn(m, m, |k, l| {
                let mut s = S::zero();
                for r in 0..m {
                    let c = space.cm(k, l, r);
                    if !c.negligible(0.0) {
                        s = s + c.clone() * gram[(r, a)].clone();
                    }
                }
                s
            })
        })
        .collect();
    let e: Vec<Matrix<S>> = d.iter().map(|da| p.mul(da).mul(&p)).collect();

    let mut t = space.traces_m().to_vec();
    let unimodular = t.iter().all(|x| x.negligible(0.0));
    let ad_h = if unimodular {
        None
    } else {
        t = p.mul_vec(&t);
        Some(space.ad_m_vec(&t))
    };
    let t4 = ad_h.map(|h| h.transpose().mul(gram).add(&gram.mul(&h)));

    let half = S::from_ratio(1, 2);
    let quarter = S::from_ratio(1, 4);
    let kill = space.killing_m();
    let mut ric = Matrix::zeros(m, m);
    for a in 0..m {
        for b in a..m {
            let t1 = frob(&ap[b], &ga[a]);
            let t2 = frob(&d[a], &e[b]);
            let mut v = quarter.clone() * t2 - half.clone() * t1 - half.clone() * kill[(a, b)].clone();
            if let Some(t4) = &t4 {
                v = v - half.clone() * t4[(a, b)].clone();
            }
            ric[(a, b)] = v.clone();
            ric[(b, a)] = v;
        }
    }
    Ok(ric)
}

fn frob<S: Scalar>(a: &Matrix<S>, b: &Matrix<S>) -> S {
    let mut s = S::zero();
    for (x, y) in a.as_slice().iter().zip(b.as_slice()) {
        if !x.negligible(0.0) && !y.negligible(0.0) {
            s = s + x.clone() * y.clone();
        }
    }
    s
}

/// Ricci operator `G⁻¹ Ric`.
pub fn ricci_operator<S: Scalar>(space: &HomogeneousSpace<S>, gram: &Matrix<S>) -> Result<Matrix<S>> {
    let ric = ricci_form(space, gram)?;
    Ok(gram.inverse()?.mul(&ric))
}

/// Frame components `Fᵗ Ric F` for the orthonormal frame given by the columns of `frame`.
pub fn ricci_in_frame<S: Scalar>(space: &HomogeneousSpace<S>, frame: &Matrix<S>) -> Result<Matrix<S>> {
    let gram = frame.inverse().map_err(|_| Error::Singular)?;
    let gram = gram.transpose().mul(&gram);
    let ric = ricci_form(space, &gram)?;
    Ok(frame.transpose().mul(&ric).mul(frame))
}

pub fn scalar_curvature<S: Scalar>(space: &HomogeneousSpace<S>, metric: &InvariantMetric<S>) -> Result<S> {
    Ok(ricci_operator(space, metric.gram())?.trace())
}

/// Einstein constant `c = scal / m` and the max-abs residual of `Ric − c g`.
pub fn einstein_residual<S: Scalar>(space: &HomogeneousSpace<S>, metric: &InvariantMetric<S>) -> Result<(S, f64)> {
    let m = space.dim();
    let ric = ricci(space, metric)?;
    let scal = metric.gram().inverse()?.mul(&ric).trace();
    let c = scal / S::from_i64(m.max(1) as i64);
    let res = ric.sub(&metric.gram().scale(&c)).max_abs();
    Ok((c, res))
}

/// `Ric(X, Y)` for complement vectors.
pub fn ricci_value<S: Scalar>(ric: &Matrix<S>, x: &[S], y: &[S]) -> S {
    let ry = ric.mul_vec(y);
    x.iter().zip(&ry).fold(S::zero(), |acc, (a, b)| acc + a.clone() * b.clone())
}

/// `Ric(x, y)` for isotropy-fixed `x, y` on a unimodular space, by the reduced formula
/// `¼ Σ ⟨[X_i,X_j]_m, x⟩⟨[X_i,X_j]_m, y⟩ − tr S(ad_m x) S(ad_m y)` over a `g`-orthonormal `{X_i}`.
///
/// The sum is written as `¼ tr(D_x P D_yᵗ P)` with `P = g⁻¹` and
/// `(D_x)_{ab} = ⟨[e_a, e_b]_m, x⟩`, so no square roots are needed.
pub fn ricci_flat_isotropy<S: Scalar>(space: &HomogeneousSpace<S>, metric: &InvariantMetric<S>, x: &[S], y: &[S]) -> Result<S> {
    let m = space.dim();
    if x.len() != m || y.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: x.len().min(y.len()) });
    }
    if !space.is_unimodular() {
        return Err(Error::NotUnimodular);
    }
    let tol = policy().structural;
    for v in [x, y] {
        let residual = space
            .isotropy_action()
            .iter()
            .map(|r| r.mul_vec(v).iter().map(|c| c.magnitude()).fold(0.0, f64::max))
            .fold(0.0, f64::max);
        if residual > tol {
            return Err(Error::NotIsotropyFixed { residual });
        }
    }
    let g = metric.gram();
    let p = g.inverse()?;
    let gx = g.mul_vec(x);
    let gy = g.mul_vec(y);
    let pairing = |w: &[S]| {
        Matrix::from_fn(m, m, |a, b| {
            let mut s = S::zero();
            for (k, wk) in w.iter().enumerate() {
                let c = space.cm(a, b, k);
                if !c.negligible(0.0) && !wk.negligible(0.0) {
                    s = s + c.clone() * wk.clone();
                }
            }
            s
        })
    };
    let (dx, dy) = (pairing(&gx), pairing(&gy));
    let first = dx.mul(&p).mul(&dy.transpose()).mul(&p).trace() * S::from_ratio(1, 4);
    let (ax, ay) = (space.ad_m_vec(x), space.ad_m_vec(y));
    // tr S(A)S(B) = ½ (tr AB + tr A*B) with A* = P Aᵗ g.
    let adjoint = p.mul(&ax.transpose()).mul(g);
    let second = (ax.mul(&ay).trace() + adjoint.mul(&ay).trace()) * S::from_ratio(1, 2);
    Ok(first - second)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;
    use crate::scalar::{rat, Rational};

    fn su2() -> LieAlgebra<Rational> {
        // [e1,e2]=e3, [e2,e3]=e1, [e3,e1]=e2
        let one = rat(1, 1);
        LieAlgebra::from_brackets(
            vec!["e1".into(), "e2".into(), "e3".into()],
            &[(0, 1, vec![(2, one.clone())]), (1, 2, vec![(0, one.clone())]), (2, 0, vec![(1, one)])],
        )
        .unwrap()
    }

    #[test]
    fn round_su2_is_einstein() {
        let g = HomogeneousSpace::lie_group("SU2", su2());
        let metric = InvariantMetric::new(&g, Matrix::identity(3)).unwrap();
        let ric = ricci(&g, &metric).unwrap();
        assert_eq!(ric, Matrix::identity(3).scale(&rat(1, 2)));
        let (c, res) = einstein_residual(&g, &metric).unwrap();
        assert_eq!(c, rat(1, 2));
        assert_eq!(res, 0.0);
    }

    #[test]
    fn heisenberg_left_invariant_ricci() {
        let h = HomogeneousSpace::lie_group("H3", LieAlgebra::<Rational>::heisenberg());
        let ric = ricci_form(&h, &Matrix::identity(3)).unwrap();
        assert_eq!(ric, Matrix::diagonal(&[rat(-1, 2), rat(-1, 2), rat(1, 2)]));
    }

    #[test]
    fn non_unimodular_hyperbolic_plane() {
        // [e1, e2] = e2: the hyperbolic plane with curvature -1.
        let a = LieAlgebra::from_brackets(vec!["e1".into(), "e2".into()], &[(0, 1, vec![(1, rat(1, 1))])]).unwrap();
        let g = HomogeneousSpace::lie_group("aff", a);
        let ric = ricci_form(&g, &Matrix::identity(2)).unwrap();
        assert_eq!(ric, Matrix::identity(2).scale(&rat(-1, 1)));
    }

    #[test]
    fn reduced_formula_matches_full_ricci_on_fixed_directions() {
        let g = HomogeneousSpace::lie_group("SU2", su2());
        let gram = Matrix::from_rows(&[
            vec![rat(3, 1), rat(1, 2), rat(0, 1)],
            vec![rat(1, 2), rat(2, 1), rat(1, 3)],
            vec![rat(0, 1), rat(1, 3), rat(1, 1)],
        ]);
        let metric = InvariantMetric::new(&g, gram.clone()).unwrap();
        let ric = ricci_form(&g, &gram).unwrap();
        for a in 0..3 {
            for b in 0..3 {
                let x: Vec<Rational> = (0..3).map(|i| rat((i == a) as i64, 1)).collect();
                let y: Vec<Rational> = (0..3).map(|i| rat((i == b) as i64 + i as i64, 1)).collect();
                assert_eq!(ricci_flat_isotropy(&g, &metric, &x, &y).unwrap(), ricci_value(&ric, &x, &y));
            }
        }
    }

    #[test]
    fn reduced_formula_rejects_non_unimodular() {
        let a = LieAlgebra::from_brackets(vec!["e1".into(), "e2".into()], &[(0, 1, vec![(1, rat(1, 1))])]).unwrap();
        let g = HomogeneousSpace::lie_group("aff", a);
        let metric = InvariantMetric::new(&g, Matrix::identity(2)).unwrap();
        let x = vec![rat(1, 1), rat(0, 1)];
        assert!(matches!(ricci_flat_isotropy(&g, &metric, &x, &x), Err(Error::NotUnimodular)));
    }
}
