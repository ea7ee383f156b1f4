use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lie::{LieAlgebra, Subalgebra};
use crate::matrix::Matrix;
use crate::policy::policy;
use crate::scalar::Scalar;

/// Which half of a Cartan decomposition a complement direction lies in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Part {
    /// Compact directions of the complement (`q`).
    Q,
    /// Non-compact directions (`p`).
    P,
    /// No Cartan split recorded.
    M,
}

impl Part {
    pub fn symbol(self) -> &'static str {
        match self {
            Part::Q => "q",
            Part::P => "p",
            Part::M => "m",
        }
    }
}

/// Reductive homogeneous space `g = k ⊕ m` in a basis adapted to the splitting.
#[derive(Clone, Debug, PartialEq)]
pub struct HomogeneousSpace<S> {
    name: String,
    algebra: LieAlgebra<S>,
    isotropy: Vec<usize>,
    complement: Vec<usize>,
    /// Part of each complement direction (all `M` without a Cartan split).
    parts: Vec<Part>,
    /// `[e_a, e_b]_m = Σ_k cm[a][b][k] e_k`, all indices complement positions.
    cm: Vec<S>,
    /// `[e_a, e_b]_k` component, `ck[a][b][z]` with `z` an isotropy position.
    ck: Vec<S>,
    /// Isotropy action on `m`: column `a` of `rho[z]` is `[Z, e_a]`.
    rho: Vec<Matrix<S>>,
    killing_m: Matrix<S>,
    traces_m: Vec<S>,
}

impl<S: Scalar> HomogeneousSpace<S> {
    pub fn new(name: impl Into<String>, algebra: LieAlgebra<S>, isotropy: Vec<usize>, complement: Vec<usize>) -> Result<Self> {
        let n = algebra.dim();
        let mut seen = vec![false; n];
        for &i in isotropy.iter().chain(&complement) {
            if i >= n || seen[i] {
                return Err(Error::NotReductive(format!(
                    "isotropy and complement must partition 0..{n} (index {i})"
                )));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::NotReductive("isotropy and complement do not span the algebra".into()));
        }
        let tol = if S::EXACT { 0.0 } else { policy().structural };
        for &z in &isotropy {
            for &w in &isotropy {
                for &k in &complement {
                    if !algebra.c(z, w, k).negligible(tol) {
                        return Err(Error::NotReductive(format!(
                            "[{}, {}] leaves the isotropy subalgebra",
                            algebra.labels()[z],
                            algebra.labels()[w]
                        )));
                    }
                }
            }
            for &a in &complement {
                for &k in &isotropy {
                    if !algebra.c(z, a, k).negligible(tol) {
                        return Err(Error::NotReductive(format!(
                            "[{}, {}] leaves the complement",
                            algebra.labels()[z],
                            algebra.labels()[a]
                        )));
                    }
                }
            }
        }
        let m = complement.len();
        let h = isotropy.len();
        let mut cm = vec![S::zero(); m * m * m];
        let mut ck = vec![S::zero(); m * m * h];
        for a in 0..m {
            for b in 0..m {
                for k in 0..m {
                    cm[(a * m + b) * m + k] = algebra.c(complement[a], complement[b], complement[k]).clone();
                }
                for z in 0..h {
                    ck[(a * m + b) * h + z] = algebra.c(complement[a], complement[b], isotropy[z]).clone();
                }
            }
        }
        let rho = isotropy
            .iter()
            .map(|&z| Matrix::from_fn(m, m, |k, a| algebra.c(z, complement[a], complement[k]).clone()))
            .collect();
        let kill = algebra.killing_form();
        let killing_m = kill.submatrix(&complement, &complement);
        let traces = algebra.ad_traces();
        let traces_m = complement.iter().map(|&a| traces[a].clone()).collect();
        Ok(HomogeneousSpace {
            name: name.into(),
            algebra,
            isotropy,
            parts: vec![Part::M; m],
            complement,
            cm,
            ck,
            rho,
            killing_m,
            traces_m,
        })
    }

    /// Lie group as a homogeneous space with trivial isotropy.
    pub fn lie_group(name: impl Into<String>, algebra: LieAlgebra<S>) -> Self {
        let n = algebra.dim();
        Self::new(name, algebra, vec![], (0..n).collect()).expect("trivial isotropy is reductive")
    }

    /// Record a Cartan split of the complement; `q` and `p` are algebra indices.
    pub fn with_cartan(mut self, q: &[usize], p: &[usize]) -> Result<Self> {
        let mut parts = vec![None; self.complement.len()];
        for (list, part) in [(q, Part::Q), (p, Part::P)] {
            for &i in list {
                let pos = self
                    .complement
                    .iter()
                    .position(|&c| c == i)
                    .ok_or_else(|| Error::Premise(format!("Cartan index {i} is not in the complement")))?;
                if parts[pos].is_some() {
                    return Err(Error::Premise(format!("Cartan index {i} listed twice")));
                }
                parts[pos] = Some(part);
            }
        }
        if parts.iter().any(|p| p.is_none()) {
            return Err(Error::Premise("Cartan split does not cover the complement".into()));
        }
        self.parts = parts.into_iter().map(|p| p.unwrap()).collect();
        for rho in &self.rho {
            for a in 0..rho.cols() {
                for k in 0..rho.rows() {
                    if self.parts[a] != self.parts[k] && !rho[(k, a)].negligible(policy().structural) {
                        return Err(Error::Premise("Cartan parts are not isotropy-invariant".into()));
                    }
                }
            }
        }
        Ok(self)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rename(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn algebra(&self) -> &LieAlgebra<S> {
        &self.algebra
    }

    pub fn isotropy(&self) -> &[usize] {
        &self.isotropy
    }

    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn has_cartan(&self) -> bool {
        self.parts.iter().all(|p| *p != Part::M) && !self.parts.is_empty()
    }

    /// Complement positions lying in `part`.
    pub fn positions(&self, part: Part) -> Vec<usize> {
        (0..self.dim()).filter(|&i| self.parts[i] == part).collect()
    }

    pub fn complement_labels(&self) -> Vec<String> {
        self.complement.iter().map(|&i| self.algebra.labels()[i].clone()).collect()
    }

    #[inline]
    pub fn cm(&self, a: usize, b: usize, k: usize) -> &S {
        let m = self.dim();
        &self.cm[(a * m + b) * m + k]
    }

    #[inline]
    pub fn ck(&self, a: usize, b: usize, z: usize) -> &S {
        let m = self.dim();
        let h = self.isotropy.len();
        &self.ck[(a * m + b) * h + z]
    }

    /// `ad_m e_a`: column `j` is `[e_a, e_j]_m`.
    pub fn ad_m(&self, a: usize) -> Matrix<S> {
        let m = self.dim();
        Matrix::from_fn(m, m, |k, j| self.cm(a, j, k).clone())
    }

    pub fn ad_m_vec(&self, x: &[S]) -> Matrix<S> {
        let m = self.dim();
        let mut out = Matrix::zeros(m, m);
        for (a, xa) in x.iter().enumerate() {
            if !xa.negligible(0.0) {
                out = out.add(&self.ad_m(a).scale(xa));
            }
        }
        out
    }

    pub fn isotropy_action(&self) -> &[Matrix<S>] {
        &self.rho
    }

    pub fn killing_m(&self) -> &Matrix<S> {
        &self.killing_m
    }

    /// `tr ad_g e_a` for complement directions.
    pub fn traces_m(&self) -> &[S] {
        &self.traces_m
    }

    pub fn is_unimodular(&self) -> bool {
        self.algebra.is_unimodular()
    }

    /// Complement coordinates to algebra coordinates.
    pub fn embed(&self, x: &[S]) -> Vec<S> {
        let mut v = vec![S::zero(); self.algebra.dim()];
        for (a, xa) in x.iter().enumerate() {
            v[self.complement[a]] = xa.clone();
        }
        v
    }

    pub fn isotropy_subalgebra(&self) -> Result<Subalgebra<S>> {
        Subalgebra::from_indices(&self.algebra, &self.isotropy)
    }

    pub fn complement_span(&self) -> Vec<Vec<S>> {
        let n = self.algebra.dim();
        self.complement
            .iter()
            .map(|&i| (0..n).map(|k| if k == i { S::one() } else { S::zero() }).collect())
            .collect()
    }

    /// Max residual of `ρᵗ G + G ρ` over the isotropy basis.
    pub fn invariance_residual(&self, gram: &Matrix<S>) -> f64 {
        self.rho
            .iter()
            .map(|r| r.transpose().mul(gram).add(&gram.mul(r)).max_abs())
            .fold(0.0, f64::max)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T + Copy) -> HomogeneousSpace<T> {
        HomogeneousSpace {
            name: self.name.clone(),
            algebra: self.algebra.map(f),
            isotropy: self.isotropy.clone(),
            complement: self.complement.clone(),
            parts: self.parts.clone(),
            cm: self.cm.iter().map(f).collect(),
            ck: self.ck.iter().map(f).collect(),
            rho: self.rho.iter().map(|r| r.map(f)).collect(),
            killing_m: self.killing_m.map(f),
            traces_m: self.traces_m.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> HomogeneousSpace<f64> {
        self.map(|x| x.to_f64())
    }
}

/// An Ad(K)-invariant inner product on the complement.
#[derive(Clone, Debug, PartialEq)]
pub struct InvariantMetric<S> {
    gram: Matrix<S>,
}

impl<S: Scalar> InvariantMetric<S> {
    pub fn new(space: &HomogeneousSpace<S>, gram: Matrix<S>) -> Result<Self> {
        let m = space.dim();
        if gram.rows() != m || gram.cols() != m {
            return Err(Error::DimensionMismatch { expected: m, found: gram.rows() });
        }
        let asym = gram.sub(&gram.transpose()).max_abs();
        if asym > if S::EXACT { 0.0 } else { policy().structural * gram.max_abs().max(1.0) } {
            return Err(Error::Premise(format!("gram matrix is not symmetric (residual {asym:e})")));
        }
        if !gram.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let residual = space.invariance_residual(&gram);
        if residual > if S::EXACT { 0.0 } else { policy().curvature * gram.max_abs().max(1.0) } {
            return Err(Error::NotInvariant { residual });
        }
        Ok(InvariantMetric { gram })
    }

    pub fn gram(&self) -> &Matrix<S> {
        &self.gram
    }

    pub fn into_gram(self) -> Matrix<S> {
        self.gram
    }

    pub fn to_f64(&self) -> InvariantMetric<f64> {
        InvariantMetric { gram: self.gram.to_f64() }
    }
}
