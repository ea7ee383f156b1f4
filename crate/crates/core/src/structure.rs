//! θ-data for `g = u ⋉_θ n` and the generalized Einstein equation on `U/K`.
//!
//! Adjoints on `n` are taken with respect to the nil metric and adjoints on
//! the complement of `U/K` with respect to the metric of `U/K`.

use serde::Serialize;
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::{ricci_form, HomogeneousSpace, InvariantMetric};
use crate::lie::json::{algebra_from_json, algebra_to_json, matrix_from_json, matrix_to_json, vector_from_json};
use crate::lie::{semidirect, LieAlgebra, Representation, SemidirectProduct, Subalgebra};
use crate::linalg::{orthonormalize, sym_eigen_generalized};
use crate::matrix::Matrix;
use crate::policy::policy;
use crate::scalar::Scalar;

/// Everything the structure results speak about, validated once.
#[derive(Clone, Debug)]
pub struct StructureData<S> {
    pub product: SemidirectProduct<S>,
    /// Semisimple part `[u, u]`, spanned in `u` coordinates.
    pub g1: Subalgebra<S>,
    /// Center `z(u)`, spanned in `u` coordinates.
    pub center: Subalgebra<S>,
    pub nil_metric: Matrix<S>,
    /// `U/K`; its algebra is `u`.
    pub uk_space: HomogeneousSpace<S>,
    pub uk_metric: InvariantMetric<S>,
    /// Inner product on `k` in isotropy order; `None` means `−B|_k`.
    pub k_metric: Option<Matrix<S>>,
}

impl<S: Scalar> StructureData<S> {
    pub fn new(
        uk_space: HomogeneousSpace<S>,
        uk_metric: InvariantMetric<S>,
        nil: LieAlgebra<S>,
        theta: Vec<Matrix<S>>,
        nil_metric: Matrix<S>,
        g1: Vec<Vec<S>>,
        center: Vec<Vec<S>>,
    ) -> Result<Self> {
        let u = uk_space.algebra().clone();
        let action = Representation::new(u.clone(), theta)?;
        let product = semidirect(&u, &nil, &action)?;
        if nil_metric.rows() != nil.dim() || nil_metric.cols() != nil.dim() {
            return Err(Error::DimensionMismatch { expected: nil.dim(), found: nil_metric.rows() });
        }
        if !nil_metric.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        if g1.len() + center.len() != u.dim() {
            return Err(Error::Premise(format!(
                "g1 and the center span {} directions, u has {}",
                g1.len() + center.len(),
                u.dim()
            )));
        }
        let mut all = g1.clone();
        all.extend(center.iter().cloned());
        Subalgebra::new(&u, all)?;
        let tol = if S::EXACT { 0.0 } else { policy().structural };
        for z in &center {
            for i in 0..u.dim() {
                let mut e = vec![S::zero(); u.dim()];
                e[i] = S::one();
                let r = u.bracket(z, &e)?.iter().map(|x| x.to_f64().abs()).fold(0.0, f64::max);
                if r > tol {
                    return Err(Error::Premise(format!("center vector does not commute with u (residual {r:e})")));
                }
            }
        }
        Ok(StructureData {
            product,
            g1: Subalgebra::new(&u, g1)?,
            center: Subalgebra::new(&u, center)?,
            nil_metric,
            uk_space,
            uk_metric,
            k_metric: None,
        })
    }

    /// Supply the inner product on `k` used for orthonormal bases of `u`.
    pub fn with_k_metric(mut self, k_metric: Matrix<S>) -> Result<Self> {
        let k = self.uk_space.isotropy().len();
        if k_metric.rows() != k || k_metric.cols() != k {
            return Err(Error::DimensionMismatch { expected: k, found: k_metric.rows() });
        }
        self.k_metric = Some(k_metric);
        Ok(self)
    }

    /// Same θ-data with another metric on `U/K`.
    pub fn with_metric(&self, gram: Matrix<S>) -> Result<Self> {
        let mut out = self.clone();
        out.uk_metric = InvariantMetric::new(&self.uk_space, gram)?;
        Ok(out)
    }

    pub fn to_f64(&self) -> Result<StructureData<f64>> {
        let space = self.uk_space.to_f64();
        let metric = InvariantMetric::new(&space, self.uk_metric.gram().to_f64())?;
        let f = |v: &[Vec<S>]| -> Vec<Vec<f64>> { v.iter().map(|x| x.iter().map(|y| y.to_f64()).collect()).collect() };
        let mut out = StructureData::new(
            space,
            metric,
            self.product.nil.to_f64(),
            self.product.action.images().iter().map(|m| m.to_f64()).collect(),
            self.nil_metric.to_f64(),
            f(self.g1.span()),
            f(self.center.span()),
        )?;
        out.k_metric = self.k_metric.as_ref().map(|m| m.to_f64());
        Ok(out)
    }

    pub fn u(&self) -> &LieAlgebra<S> {
        &self.product.reductive
    }

    pub fn theta(&self, x: &[S]) -> Matrix<S> {
        self.product.action.image(x)
    }

    /// `θ(X)*` for the nil metric.
    pub fn adjoint(&self, a: &Matrix<S>) -> Result<Matrix<S>> {
        let n = &self.nil_metric;
        Ok(n.inverse()?.mul(&a.transpose()).mul(n))
    }

    /// `S(θ(X))`.
    pub fn sym_theta(&self, x: &[S]) -> Result<Matrix<S>> {
        symmetric_part(&self.theta(x), &self.nil_metric)
    }

    /// `G = U ⋉ N` over `K`, with complement `m ⊕ n`.
    pub fn total_space(&self) -> Result<HomogeneousSpace<S>> {
        let a = self.u().dim();
        let mut complement = self.uk_space.complement().to_vec();
        complement.extend(a..a + self.product.nil.dim());
        HomogeneousSpace::new(
            format!("{}⋉n", self.uk_space.name()),
            self.product.total.clone(),
            self.uk_space.isotropy().to_vec(),
            complement,
        )
    }

    /// `g_{U/K} ⊕ g_N` on `m ⊕ n`.
    pub fn total_metric(&self) -> Matrix<S> {
        Matrix::block_diag(&[self.uk_metric.gram().clone(), self.nil_metric.clone()])
    }

    /// Inner product on `k` in isotropy order.
    pub fn k_inner_product(&self) -> Result<Matrix<S>> {
        if let Some(m) = &self.k_metric {
            return Ok(m.clone());
        }
        let iso = self.uk_space.isotropy();
        let b = self.u().killing_form().submatrix(iso, iso);
        Ok(b.scale(&(S::zero() - S::one())))
    }

    /// Inner product on all of `u`, with `k ⊥ m`.
    pub fn u_inner_product(&self) -> Result<Matrix<S>> {
        let iso = self.uk_space.isotropy();
        let comp = self.uk_space.complement();
        let ek = self.k_inner_product()?;
        if iso.is_empty() {
            return Ok(self.uk_metric.gram().clone());
        }
        if !ek.is_positive_definite() {
            return Err(Error::Premise("inner product on k is not positive definite".into()));
        }
        let tol = if S::EXACT { 0.0 } else { policy().curvature * ek.max_abs().max(1.0) };
        let u = self.u();
        for &z in iso {
            let a = u.ad_basis(z).submatrix(iso, iso);
            let r = a.transpose().mul(&ek).add(&ek.mul(&a)).max_abs();
            if r > tol {
                return Err(Error::NotInvariant { residual: r });
            }
        }
        let n = u.dim();
        let mut g = Matrix::zeros(n, n);
        for (i, &a) in iso.iter().enumerate() {
            for (j, &b) in iso.iter().enumerate() {
                g[(a, b)] = ek[(i, j)].clone();
            }
        }
        let gm = self.uk_metric.gram();
        for (i, &a) in comp.iter().enumerate() {
            for (j, &b) in comp.iter().enumerate() {
                g[(a, b)] = gm[(i, j)].clone();
            }
        }
        Ok(g)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "u": algebra_to_json(self.u()),
            "n": algebra_to_json(&self.product.nil),
            "theta": self.product.action.images().iter().map(matrix_to_json).collect::<Vec<_>>(),
            "g1": self.g1.span().iter().map(|v| v.iter().map(|x| x.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "center": self.center.span().iter().map(|v| v.iter().map(|x| x.to_json()).collect::<Vec<_>>()).collect::<Vec<_>>(),
            "nil_metric": matrix_to_json(&self.nil_metric),
            "isotropy": self.uk_space.isotropy(),
            "complement": self.uk_space.complement(),
            "uk_metric": matrix_to_json(self.uk_metric.gram()),
            "k_metric": self.k_metric.as_ref().map(matrix_to_json),
        })
    }

    /// Inverse of [`StructureData::to_json`]. `isotropy` defaults to empty, `k_metric` to `−B|_k`.
    pub fn from_json(v: &Value) -> Result<Self> {
        let field = |name: &str| v.get(name).ok_or_else(|| Error::Parse(format!("missing field \"{name}\"")));
        let vectors = |name: &str| -> Result<Vec<Vec<S>>> {
            match v.get(name) {
                None | Some(Value::Null) => Ok(vec![]),
                Some(Value::Array(a)) => a.iter().map(vector_from_json).collect(),
                Some(_) => Err(Error::Parse(format!("{name} must be an array of vectors"))),
            }
        };
        let indices = |name: &str| -> Result<Option<Vec<usize>>> {
            match v.get(name) {
                None => Ok(None),
                Some(x) => serde_json::from_value(x.clone())
                    .map(Some)
                    .map_err(|_| Error::Parse(format!("{name} must be an array of indices"))),
            }
        };
        let u: LieAlgebra<S> = algebra_from_json(field("u")?)?;
        let nil: LieAlgebra<S> = algebra_from_json(field("n")?)?;
        let theta = field("theta")?
            .as_array()
            .ok_or_else(|| Error::Parse("theta must be an array of matrices".into()))?
            .iter()
            .map(matrix_from_json)
            .collect::<Result<Vec<_>>>()?;
        let isotropy = indices("isotropy")?.unwrap_or_default();
        let complement = indices("complement")?.unwrap_or_else(|| (0..u.dim()).filter(|i| !isotropy.contains(i)).collect());
        let space = HomogeneousSpace::new(v.get("name").and_then(Value::as_str).unwrap_or("U/K"), u, isotropy, complement)?;
        let metric = InvariantMetric::new(&space, matrix_from_json(field("uk_metric")?)?)?;
        let nil_metric = matrix_from_json(field("nil_metric")?)?;
        let data = StructureData::new(space, metric, nil, theta, nil_metric, vectors("g1")?, vectors("center")?)?;
        match v.get("k_metric") {
            None | Some(Value::Null) => Ok(data),
            Some(m) => data.with_k_metric(matrix_from_json(m)?),
        }
    }
}

/// `½(A + A*)` with `A* = G⁻¹AᵗG`.
pub fn symmetric_part<S: Scalar>(a: &Matrix<S>, metric: &Matrix<S>) -> Result<Matrix<S>> {
    if !a.is_square() || a.rows() != metric.rows() {
        return Err(Error::DimensionMismatch { expected: metric.rows(), found: a.rows() });
    }
    let star = metric.inverse()?.mul(&a.transpose()).mul(metric);
    Ok(a.add(&star).scale(&S::from_ratio(1, 2)))
}

/// `tr S(θ(e_a))S(θ(e_b))` over the stored complement basis of `U/K`.
pub fn c_theta_form<S: Scalar>(data: &StructureData<S>) -> Result<Matrix<S>> {
    let u = data.u().dim();
    let comp = data.uk_space.complement();
    let syms = comp
        .iter()
        .map(|&i| {
            let mut e = vec![S::zero(); u];
            e[i] = S::one();
            data.sym_theta(&e)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = comp.len();
    Ok(Matrix::from_fn(m, m, |a, b| syms[a].trace_product(&syms[b])))
}

/// `⟨C_θ X_i, X_j⟩` for the columns `X_i` of `frame`.
pub fn c_theta_in_frame<S: Scalar>(data: &StructureData<S>, frame: &Matrix<S>) -> Result<Matrix<S>> {
    let t = c_theta_form(data)?;
    Ok(frame.transpose().mul(&t).mul(frame))
}

/// `⟨C_θ X_i, X_j⟩` over a `uk_metric`-orthonormal complement basis.
pub fn c_theta_operator(data: &StructureData<f64>) -> Result<Matrix<f64>> {
    let frame = data.uk_metric.gram().orthonormal_frame()?;
    c_theta_in_frame(data, &frame)
}

#[derive(Clone, Debug, Serialize)]
pub struct MomentMapReport<S> {
    pub residual: f64,
    #[serde(skip)]
    pub matrix: Matrix<S>,
    /// Max-norm of `θ(Z) − θ(Z)*` over the center.
    pub center_symmetry: f64,
}

/// `Σ [θ(Y_i), θ(Y_i)*]` over an orthonormal basis of `u`.
///
/// Computed as `Σ P_ab [θ(e_a), θ(e_b)*]` with `P` the inverse Gram matrix of
/// the inner product on `u`, so no square roots are needed.
pub fn moment_map_residual<S: Scalar>(data: &StructureData<S>) -> Result<MomentMapReport<S>> {
    let gu = data.u_inner_product()?;
    let p = gu.inverse()?;
    let imgs = data.product.action.images();
    let stars = imgs.iter().map(|a| data.adjoint(a)).collect::<Result<Vec<_>>>()?;
    let n = data.product.nil.dim();
    let mut total = Matrix::zeros(n, n);
    for a in 0..imgs.len() {
        for b in 0..imgs.len() {
            if p[(a, b)].negligible(0.0) {
                continue;
            }
            total = total.add(&imgs[a].commutator(&stars[b]).scale(&p[(a, b)]));
        }
    }
    let mut center_symmetry = 0.0f64;
    for z in data.center.span() {
        let t = data.theta(z);
        center_symmetry = center_symmetry.max(t.sub(&data.adjoint(&t)?).max_abs());
    }
    Ok(MomentMapReport { residual: total.max_abs(), matrix: total, center_symmetry })
}

#[derive(Clone, Debug)]
pub struct GeneralizedEinsteinReport<S> {
    /// `C_θ` as a bilinear form in the stored complement basis.
    pub c_theta: Matrix<S>,
    /// `G⁻¹(Ric − C_θ)`, the endomorphism whose scalar part is `c`.
    pub ricci_theta: Matrix<S>,
    pub c_estimate: S,
    /// Max-norm of `Ric − C_θ − c·g`.
    pub residual: f64,
}

impl<S: Scalar> GeneralizedEinsteinReport<S> {
    pub fn to_json(&self) -> Value {
        json!({
            "c_theta": matrix_to_json(&self.c_theta),
            "ricci_theta": matrix_to_json(&self.ricci_theta),
            "c": self.c_estimate.to_json(),
            "residual": self.residual,
        })
    }
}

/// Compare `Ric_{U/K} − C_θ` with a multiple of the metric.
pub fn generalized_einstein<S: Scalar>(data: &StructureData<S>) -> Result<GeneralizedEinsteinReport<S>> {
    let g = data.uk_metric.gram();
    let ric = ricci_form(&data.uk_space, g)?;
    let t = c_theta_form(data)?;
    let diff = ric.sub(&t);
    let ricci_theta = g.inverse()?.mul(&diff);
    let m = g.rows();
    let c = if m == 0 { S::zero() } else { ricci_theta.trace() / S::from_i64(m as i64) };
    let residual = diff.sub(&g.scale(&c)).max_abs();
    Ok(GeneralizedEinsteinReport { c_theta: t, ricci_theta, c_estimate: c, residual })
}

/// `Fᵗ(Ric − C_θ)F`, the entries `r^θ_ij` in the frame given by the columns of `F`.
pub fn ricci_theta_in_frame<S: Scalar>(data: &StructureData<S>, gram: &Matrix<S>, frame: &Matrix<S>) -> Result<Matrix<S>> {
    let ric = ricci_form(&data.uk_space, gram)?;
    let t = c_theta_form(data)?;
    Ok(frame.transpose().mul(&ric.sub(&t)).mul(frame))
}

#[derive(Clone, Debug)]
pub struct NilsolitonFit<S> {
    pub c: S,
    pub derivation: Matrix<S>,
    pub residual: f64,
}

/// Fit `Ric_N = c·I + D` with `D` a derivation of `n`.
pub fn nilsoliton_residual<S: Scalar>(n: &LieAlgebra<S>, metric: &Matrix<S>) -> Result<NilsolitonFit<S>> {
    if !n.is_nilpotent() {
        return Err(Error::NotNilpotent);
    }
    let dim = n.dim();
    if metric.rows() != dim || metric.cols() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: metric.rows() });
    }
    if !metric.is_positive_definite() {
        return Err(Error::NotPositiveDefinite);
    }
    let group = HomogeneousSpace::lie_group("N", n.clone());
    let ric = metric.inverse()?.mul(&ricci_form(&group, metric)?);
    if n.structure_constants().iter().all(|x| x.negligible(0.0)) {
        return Ok(NilsolitonFit { c: S::zero(), derivation: Matrix::zeros(dim, dim), residual: ric.max_abs() });
    }
    let ders = n.derivations();
    let mut cols: Vec<Vec<S>> = vec![Matrix::<S>::identity(dim).as_slice().to_vec()];
    cols.extend(ders.iter().map(|d| d.as_slice().to_vec()));
    let a = Matrix::from_columns(&cols, dim * dim);
    let b = Matrix::from_columns(&[ric.as_slice().to_vec()], dim * dim);
    let at = a.transpose();
    let x = at.mul(&a).solve(&at.mul(&b))?.column(0);
    let mut d = Matrix::zeros(dim, dim);
    for (k, dk) in ders.iter().enumerate() {
        d = d.add(&dk.scale(&x[k + 1]));
    }
    let c = x[0].clone();
    let fit = Matrix::<S>::identity(dim).scale(&c).add(&d);
    Ok(NilsolitonFit { c, derivation: d, residual: ric.sub(&fit).max_abs() })
}

#[derive(Clone, Debug, Serialize)]
pub struct WeightDecomposition {
    /// Nil-metric-orthonormal bases of the weight spaces.
    pub subspaces: Vec<Vec<Vec<f64>>>,
    /// Weight of each subspace on each center basis vector.
    pub weights: Vec<Vec<f64>>,
    /// How far `S(θ(Z))` is from a scalar on each block.
    pub scalar_residual: f64,
    /// Norm of the off-block part of `θ` on `g1`.
    pub preserve_residual: f64,
    /// Largest trace of `θ(Y)` co-restricted to a block, `Y ∈ g1`.
    pub traceless_residual: f64,
}

/// Simultaneous eigenspaces of `S(θ(Z))` for `Z` in the center.
pub fn weight_decomposition(data: &StructureData<f64>) -> Result<WeightDecomposition> {
    let nm = &data.nil_metric;
    let n = nm.rows();
    let syms = data.center.span().iter().map(|z| data.sym_theta(z)).collect::<Result<Vec<_>>>()?;
    let tol = policy().curvature;
    for i in 0..syms.len() {
        for j in i + 1..syms.len() {
            let r = syms[i].commutator(&syms[j]).max_abs();
            if r > tol * syms[i].max_abs().max(syms[j].max_abs()).max(1.0) {
                return Err(Error::NonCommuting { residual: r });
            }
        }
    }
    let mut combo = Matrix::zeros(n, n);
    for (k, s) in syms.iter().enumerate() {
        combo = combo.add(&s.scale(&(1.0 / (k as f64 + std::f64::consts::PI))));
    }
    let (vals, vecs) = sym_eigen_generalized(&nm.mul(&combo).symmetrize(), nm)?;
    let scale = vals.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for (i, v) in vals.iter().enumerate() {
        match groups.last_mut() {
            Some(g) if (vals[*g.last().unwrap()] - v).abs() <= 1e-8 * scale => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let ip = |a: &[f64], b: &[f64]| -> f64 { a.iter().zip(nm.mul_vec(b)).map(|(x, y)| x * y).sum() };
    let subspaces: Vec<Vec<Vec<f64>>> = groups
        .iter()
        .map(|g| {
            let raw: Vec<Vec<f64>> = g.iter().map(|&i| vecs.column(i)).collect();
            orthonormalize(&raw, nm, 1e-10)
        })
        .collect();
    let mut weights = Vec::new();
    let mut scalar_residual = 0.0f64;
    for block in &subspaces {
        let mut w = Vec::new();
        for s in &syms {
            let alpha = ip(&block[0], &s.mul_vec(&block[0]));
            for v in block {
                let sv = s.mul_vec(v);
                let r = sv.iter().zip(v).map(|(a, b)| (a - alpha * b).abs()).fold(0.0, f64::max);
                scalar_residual = scalar_residual.max(r);
            }
            w.push(alpha);
        }
        weights.push(w);
    }
    let mut preserve_residual = 0.0f64;
    let mut traceless_residual = 0.0f64;
    for y in data.g1.span() {
        let t = data.theta(y);
        for (i, bi) in subspaces.iter().enumerate() {
            let mut tr = 0.0;
            for v in bi {
                let tv = t.mul_vec(v);
                for (j, bj) in subspaces.iter().enumerate() {
                    for w in bj {
                        let x = ip(w, &tv);
                        if i == j {
                            if std::ptr::eq(v, w) {
                                tr += x;
                            }
                        } else {
                            preserve_residual = preserve_residual.max(x.abs());
                        }
                    }
                }
            }
            traceless_residual = traceless_residual.max(tr.abs());
        }
    }
    Ok(WeightDecomposition { subspaces, weights, scalar_residual, preserve_residual, traceless_residual })
}

/// Max `|⟨C_θ Y, X⟩|` for `Y ∈ g1`, `X ∈ z(u)`, using `tr S(θ(Y))S(θ(X))`.
pub fn center_cross_c_theta<S: Scalar>(data: &StructureData<S>) -> Result<f64> {
    let mut worst = 0.0f64;
    for y in data.g1.span() {
        let sy = data.sym_theta(y)?;
        for x in data.center.span() {
            worst = worst.max(sy.trace_product(&data.sym_theta(x)?).to_f64().abs());
        }
    }
    Ok(worst)
}

/// Whether `z(u) ∩ m` and `g1 ∩ m` are orthogonal for the metric of `U/K`.
pub fn center_orthogonality_check(data: &StructureData<f64>) -> Result<(bool, f64)> {
    let zm = intersect_complement(data, data.center.span());
    let gm = intersect_complement(data, data.g1.span());
    let g = data.uk_metric.gram();
    let zm = orthonormalize(&zm, g, 1e-10);
    let gm = orthonormalize(&gm, g, 1e-10);
    let mut worst = 0.0f64;
    for z in &zm {
        let gz = g.mul_vec(z);
        for y in &gm {
            worst = worst.max(gz.iter().zip(y).map(|(a, b)| a * b).sum::<f64>().abs());
        }
    }
    Ok((worst <= policy().curvature, worst))
}

/// Basis of `span ∩ m` in complement coordinates.
fn intersect_complement(data: &StructureData<f64>, span: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let iso = data.uk_space.isotropy();
    let comp = data.uk_space.complement();
    if span.is_empty() {
        return vec![];
    }
    // Combinations of the span with vanishing isotropy coordinates.
    let rows: Vec<Vec<f64>> = iso.iter().map(|&i| span.iter().map(|v| v[i]).collect()).collect();
    let coeffs = if rows.is_empty() {
        Matrix::<f64>::identity(span.len())
    } else {
        Matrix::from_rows(&rows).null_space(policy().rank_gap)
    };
    coeffs
        .columns()
        .into_iter()
        .map(|c| comp.iter().map(|&i| span.iter().zip(&c).map(|(v, x)| v[i] * x).sum()).collect())
        .collect()
}

#[derive(Clone, Debug)]
pub struct RankOneReduction<S> {
    pub space: HomogeneousSpace<S>,
    pub metric: Matrix<S>,
    /// Basis of `x^⊥ ∩ m` used for the reduced complement, in complement coordinates.
    pub basis: Matrix<S>,
    /// `ad x` on the reduced complement, for `x` as given (not normalized).
    pub a: Matrix<S>,
    /// Max-norm of `Ric|_{p̃} − Ric~ − ½⟨[A, A*]·,·⟩`.
    pub residual: f64,
}

/// Split off a direction `x` of the complement whose orthogonal complement is an ideal.
pub fn rank_one_reduction<S: Scalar>(space: &HomogeneousSpace<S>, gram: &Matrix<S>, x: &[S]) -> Result<RankOneReduction<S>> {
    let m = space.dim();
    if x.len() != m {
        return Err(Error::DimensionMismatch { expected: m, found: x.len() });
    }
    let tol = if S::EXACT { 0.0 } else { policy().structural * gram.max_abs().max(1.0) };
    let g = space.algebra();
    let h = gram.inverse()?.mul_vec(space.traces_m());
    let hx = g.bracket(&space.embed(&h), &space.embed(x))?;
    let r = hx.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    if r > tol {
        return Err(Error::NotCentralized { residual: r });
    }
    let gx = gram.mul_vec(x);
    let hx_ip: S = gx.iter().zip(&h).fold(S::zero(), |s, (a, b)| s + a.clone() * b.clone());
    if !hx_ip.negligible(tol) {
        return Err(Error::NotIdeal("the orthogonal complement of x does not contain H".into()));
    }
    let basis = Matrix::from_rows(&[gx]).null_space(policy().rank_gap);
    let iso = space.isotropy();
    let n = g.dim();
    let unit = |i: usize| -> Vec<S> { (0..n).map(|k| if k == i { S::one() } else { S::zero() }).collect() };
    let mut cols: Vec<Vec<S>> = iso.iter().map(|&i| unit(i)).collect();
    cols.extend(basis.columns().iter().map(|c| space.embed(c)));
    cols.push(space.embed(x));
    let k = iso.len();
    let mut labels: Vec<String> = iso.iter().map(|&i| g.labels()[i].clone()).collect();
    labels.extend((0..m - 1).map(|i| format!("p{}", i + 1)));
    labels.push("x".into());
    let p = Matrix::from_columns(&cols, n);
    let full = g.change_basis(&p, labels.clone())?;
    for i in 0..n {
        for j in 0..n - 1 {
            if !full.c(i, j, n - 1).negligible(tol) {
                return Err(Error::NotIdeal("the orthogonal complement of x is not an ideal".into()));
            }
        }
    }
    let rd = n - 1;
    let mut c = vec![S::zero(); rd * rd * rd];
    for i in 0..rd {
        for j in 0..rd {
            for l in 0..rd {
                c[(i * rd + j) * rd + l] = full.c(i, j, l).clone();
            }
        }
    }
    let reduced_alg = LieAlgebra::new(labels[..rd].to_vec(), c)?;
    let reduced = HomogeneousSpace::new(format!("{}~", space.name()), reduced_alg, (0..k).collect(), (k..rd).collect())?;
    let metric = basis.transpose().mul(gram).mul(&basis);
    let a = Matrix::from_fn(m - 1, m - 1, |i, j| full.c(n - 1, k + j, k + i).clone());
    let a_star = metric.inverse()?.mul(&a.transpose()).mul(&metric);
    // The identity holds for a unit vector; ad(x/|x|) = ad(x)/|x| rescales the commutator by |x|⁻².
    let correction = metric.mul(&a.commutator(&a_star)).scale(&(S::from_ratio(1, 2) / norm_sq(gram, x)));
    let big = basis.transpose().mul(&ricci_form(space, gram)?).mul(&basis);
    let small = ricci_form(&reduced, &metric)?;
    let residual = big.sub(&small).sub(&correction).max_abs();
    Ok(RankOneReduction { space: reduced, metric, basis, a, residual })
}

fn norm_sq<S: Scalar>(gram: &Matrix<S>, x: &[S]) -> S {
    gram.mul_vec(x).iter().zip(x).fold(S::zero(), |s, (a, b)| s + a.clone() * b.clone())
}

/// Max-norm of `S(ad H)` on the complement of `U/K`, for `H` the mean curvature vector of `G/K`.
pub fn mean_curvature_symmetric_part_check<S: Scalar>(data: &StructureData<S>) -> Result<f64> {
    let total = data.total_space()?;
    let gram = data.total_metric();
    let h = gram.inverse()?.mul_vec(total.traces_m());
    let ad = total.ad_m_vec(&h);
    let m: Vec<usize> = (0..data.uk_space.dim()).collect();
    let block = ad.submatrix(&m, &m);
    Ok(symmetric_part(&block, data.uk_metric.gram())?.max_abs())
}

/// Orthogonality defect of `g` conjugating one moment-map zero into another.
///
/// Returns the max-norm of `gᵗNg − λN` with `λ` fitted, and the max-norm of
/// `θ₂ g − g θ₁` over the basis.
pub fn conjugation_rigidity(theta1: &[Matrix<f64>], theta2: &[Matrix<f64>], g: &Matrix<f64>, nil_metric: &Matrix<f64>) -> (f64, f64) {
    let q = g.transpose().mul(nil_metric).mul(g);
    let lambda = q.trace() / nil_metric.trace();
    let ortho = q.sub(&nil_metric.scale(&lambda)).max_abs();
    let intertwine = theta1
        .iter()
        .zip(theta2)
        .map(|(a, b)| b.mul(g).sub(&g.mul(a)).max_abs())
        .fold(0.0, f64::max);
    (ortho, intertwine)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn r(p: i64) -> Rational {
        rat(p, 1)
    }

    fn abelian_line(theta: Matrix<Rational>) -> StructureData<Rational> {
        let u = LieAlgebra::<Rational>::abelian(1);
        let space = HomogeneousSpace::lie_group("R", u);
        let metric = InvariantMetric::new(&space, Matrix::identity(1)).unwrap();
        let n = theta.rows();
        StructureData::new(space, metric, LieAlgebra::abelian(n), vec![theta], Matrix::identity(n), vec![], vec![vec![r(1)]]).unwrap()
    }

    #[test]
    fn symmetric_part_uses_metric_adjoint() {
        let a = Matrix::from_rows(&[vec![r(0), r(1)], vec![r(0), r(0)]]);
        let g = Matrix::diagonal(&[r(1), r(4)]);
        let s = symmetric_part(&a, &g).unwrap();
        assert_eq!(s, Matrix::from_rows(&[vec![r(0), rat(1, 2)], vec![rat(1, 8), r(0)]]));
        assert_eq!(symmetric_part(&s, &g).unwrap(), s);
    }

    #[test]
    fn non_normal_central_action_breaks_moment_map() {
        let d = abelian_line(Matrix::from_rows(&[vec![r(0), r(1)], vec![r(0), r(0)]]));
        let mm = moment_map_residual(&d).unwrap();
        assert_eq!(mm.residual, 1.0);
        assert!(mm.center_symmetry > 0.0);
    }

    #[test]
    fn hyperbolic_space_as_solvmanifold() {
        let d = abelian_line(Matrix::identity(3));
        let ge = generalized_einstein(&d).unwrap();
        assert_eq!(ge.c_theta, Matrix::from_rows(&[vec![r(3)]]));
        assert_eq!(mean_curvature_symmetric_part_check(&d).unwrap(), 0.0);
        let w = weight_decomposition(&d.to_f64().unwrap()).unwrap();
        assert_eq!(w.subspaces.len(), 1);
        assert!((w.weights[0][0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn heisenberg_nilsoliton_constant() {
        let fit = nilsoliton_residual(&LieAlgebra::<Rational>::heisenberg(), &Matrix::identity(3)).unwrap();
        assert_eq!(fit.c, rat(-3, 2));
        assert_eq!(fit.derivation, Matrix::diagonal(&[r(1), r(1), r(2)]));
        assert_eq!(fit.residual, 0.0);
    }

    #[test]
    fn abelian_nilsoliton_convention() {
        let fit = nilsoliton_residual(&LieAlgebra::<Rational>::abelian(3), &Matrix::diagonal(&[r(1), r(2), r(3)])).unwrap();
        assert_eq!(fit.c, r(0));
        assert_eq!(fit.residual, 0.0);
    }
}
