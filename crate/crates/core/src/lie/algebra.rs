use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::policy::policy;
use crate::scalar::Scalar;

/// A finite-dimensional real Lie algebra given by structure constants
/// `[e_i, e_j] = Σ_k c[i][j][k] e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct LieAlgebra<S> {
    labels: Vec<String>,
    c: Vec<S>,
}

fn check_len(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

impl<S: Scalar> LieAlgebra<S> {
    /// Validates antisymmetry and the Jacobi identity.
    pub fn new(labels: Vec<String>, c: Vec<S>) -> Result<Self> {
        let n = labels.len();
        check_len(n * n * n, c.len())?;
        let g = LieAlgebra { labels, c };
        let tol = policy().structural;
        for i in 0..n {
            for j in i..n {
                for k in 0..n {
                    let s = g.c(i, j, k).clone() + g.c(j, i, k).clone();
                    if !s.negligible(tol) {
                        return Err(Error::NotAntisymmetric { i, j, k });
                    }
                }
            }
        }
        let residual = g.jacobi_residual();
        if residual > if S::EXACT { 0.0 } else { tol } {
            return Err(Error::Jacobi { residual });
        }
        Ok(g)
    }

    /// Build from the nonzero brackets `[e_i, e_j] = Σ coeff·e_k` with `i != j`;
    /// the opposite order is filled in by antisymmetry.
    pub fn from_brackets(labels: Vec<String>, brackets: &[(usize, usize, Vec<(usize, S)>)]) -> Result<Self> {
        let n = labels.len();
        let mut c = vec![S::zero(); n * n * n];
        let mut seen = vec![false; n * n];
        for (i, j, coeffs) in brackets {
            let (i, j) = (*i, *j);
            if i >= n || j >= n {
                return Err(Error::DimensionMismatch { expected: n, found: i.max(j) + 1 });
            }
            if i == j {
                if coeffs.iter().any(|(_, v)| !v.negligible(0.0)) {
                    return Err(Error::NotAntisymmetric { i, j, k: coeffs[0].0 });
                }
                continue;
            }
            let mut row = vec![S::zero(); n];
            for (k, v) in coeffs {
                if *k >= n {
                    return Err(Error::DimensionMismatch { expected: n, found: k + 1 });
                }
                row[*k] = row[*k].clone() + v.clone();
            }
            if seen[j * n + i] {
                // Both orders supplied: they must agree.
                for (k, v) in row.iter().enumerate() {
                    let s = c[(j * n + i) * n + k].clone() + v.clone();
                    if !s.negligible(policy().structural) {
                        return Err(Error::NotAntisymmetric { i, j, k });
                    }
                }
                continue;
            }
            if seen[i * n + j] {
                return Err(Error::Parse(format!("bracket ({i},{j}) given twice")));
            }
            seen[i * n + j] = true;
            seen[j * n + i] = true;
            for (k, v) in row.into_iter().enumerate() {
                c[(j * n + i) * n + k] = -v.clone();
                c[(i * n + j) * n + k] = v;
            }
        }
        Self::new(labels, c)
    }

    pub fn abelian(n: usize) -> Self {
        let labels = (1..=n).map(|i| format!("e{i}")).collect();
        LieAlgebra {
            labels,
            c: vec![S::zero(); n * n * n],
        }
    }

    /// Three-dimensional Heisenberg algebra `[e1, e2] = e3`.
    pub fn heisenberg() -> Self {
        let labels = vec!["e1".into(), "e2".into(), "e3".into()];
        Self::from_brackets(labels, &[(0, 1, vec![(2, S::one())])]).expect("Heisenberg is a Lie algebra")
    }

    /// Structure constants of a matrix Lie algebra spanned by `mats`.
    pub fn from_matrices(labels: Vec<String>, mats: &[Matrix<S>]) -> Result<Self> {
        let n = mats.len();
        check_len(labels.len(), n)?;
        let coords = MatrixCoordinates::new(mats)?;
        let mut c = vec![S::zero(); n * n * n];
        for i in 0..n {
            for j in i + 1..n {
                let br = mats[i].commutator(&mats[j]);
                let x = coords.coordinates(&br)?;
                for k in 0..n {
                    c[(i * n + j) * n + k] = x[k].clone();
                    c[(j * n + i) * n + k] = -x[k].clone();
                }
            }
        }
        Self::new(labels, c)
    }

    pub fn dim(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    #[inline]
    pub fn c(&self, i: usize, j: usize, k: usize) -> &S {
        let n = self.dim();
        &self.c[(i * n + j) * n + k]
    }

    pub fn structure_constants(&self) -> &[S] {
        &self.c
    }

    /// Coordinates of `[e_i, e_j]`.
    pub fn bracket_basis(&self, i: usize, j: usize) -> Vec<S> {
        let n = self.dim();
        self.c[(i * n + j) * n..(i * n + j + 1) * n].to_vec()
    }

    pub fn bracket(&self, x: &[S], y: &[S]) -> Result<Vec<S>> {
        let n = self.dim();
        check_len(n, x.len())?;
        check_len(n, y.len())?;
        let mut out = vec![S::zero(); n];
        for i in 0..n {
            if x[i].negligible(0.0) {
                continue;
            }
            for j in 0..n {
                if y[j].negligible(0.0) {
                    continue;
                }
                let w = x[i].clone() * y[j].clone();
                for (k, o) in out.iter_mut().enumerate() {
                    let cc = self.c(i, j, k);
                    if !cc.negligible(0.0) {
                        *o = o.clone() + w.clone() * cc.clone();
                    }
                }
            }
        }
        Ok(out)
    }

    /// Matrix of `ad e_i`: column `j` holds `[e_i, e_j]`.
    pub fn ad_basis(&self, i: usize) -> Matrix<S> {
        let n = self.dim();
        Matrix::from_fn(n, n, |k, j| self.c(i, j, k).clone())
    }

    pub fn ad(&self, x: &[S]) -> Result<Matrix<S>> {
        let n = self.dim();
        check_len(n, x.len())?;
        let mut m = Matrix::zeros(n, n);
        for (i, xi) in x.iter().enumerate() {
            if xi.negligible(0.0) {
                continue;
            }
            m = m.add(&self.ad_basis(i).scale(xi));
        }
        Ok(m)
    }

    /// `B(e_i, e_j) = tr(ad e_i ad e_j)`.
    pub fn killing_form(&self) -> Matrix<S> {
        let n = self.dim();
        let ads: Vec<Matrix<S>> = (0..n).map(|i| self.ad_basis(i)).collect();
        let mut b = Matrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v = ads[i].trace_product(&ads[j]);
                b[(i, j)] = v.clone();
                b[(j, i)] = v;
            }
        }
        b
    }

    /// `tr ad e_i` for every basis vector.
    pub fn ad_traces(&self) -> Vec<S> {
        let n = self.dim();
        (0..n)
            .map(|i| {
                let mut t = S::zero();
                for j in 0..n {
                    t = t + self.c(i, j, j).clone();
                }
                t
            })
            .collect()
    }

    pub fn is_unimodular(&self) -> bool {
        let tol = policy().structural;
        self.ad_traces().iter().all(|t| t.negligible(tol))
    }

    /// Max-abs residual of the Jacobi identity over basis triples.
    pub fn jacobi_residual(&self) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                for k in j + 1..n {
                    for m in 0..n {
                        let mut s = S::zero();
                        for l in 0..n {
                            let a = self.c(i, j, l);
                            if !a.negligible(0.0) {
                                s = s + a.clone() * self.c(l, k, m).clone();
                            }
                            let b = self.c(j, k, l);
                            if !b.negligible(0.0) {
                                s = s + b.clone() * self.c(l, i, m).clone();
                            }
                            let d = self.c(k, i, l);
                            if !d.negligible(0.0) {
                                s = s + d.clone() * self.c(l, j, m).clone();
                            }
                        }
                        worst = worst.max(s.magnitude());
                    }
                }
            }
        }
        worst
    }

    fn rank_of(&self, m: &Matrix<S>) -> usize {
        if m.cols() == 0 || m.rows() == 0 {
            return 0;
        }
        if S::EXACT {
            m.rank(0.0)
        } else {
            crate::linalg::rank(&m.to_f64(), policy().rank_gap)
        }
    }

    /// Dimensions of the lower central series `g ⊇ [g,g] ⊇ …` until it stabilizes.
    pub fn lower_central_series_dims(&self) -> Vec<usize> {
        let n = self.dim();
        let mut dims = vec![n];
        let mut current: Vec<Vec<S>> = (0..n)
            .map(|i| {
                let mut v = vec![S::zero(); n];
                v[i] = S::one();
                v
            })
            .collect();
        loop {
            let mut gens = Vec::new();
            for i in 0..n {
                let ad = self.ad_basis(i);
                for v in &current {
                    gens.push(ad.mul_vec(v));
                }
            }
            let basis = span_basis(&gens, n);
            let d = basis.len();
            if d == *dims.last().unwrap() || d == 0 {
                dims.push(d);
                return dims;
            }
            dims.push(d);
            current = basis;
        }
    }

    pub fn is_nilpotent(&self) -> bool {
        *self.lower_central_series_dims().last().unwrap() == 0
    }

    /// Brute-force oracle: every `ad x` nilpotent, sampled on basis sums.
    pub fn ad_nilpotent_on(&self, x: &[S]) -> bool {
        let n = self.dim();
        let ad = match self.ad(x) {
            Ok(a) => a,
            Err(_) => return false,
        };
        let mut p = Matrix::identity(n);
        for _ in 0..n {
            p = p.mul(&ad);
        }
        p.is_zero(if S::EXACT { 0.0 } else { 1e-9 * ad.max_abs().max(1.0).powi(n as i32) })
    }

    /// Unique `H` with `⟨H, X⟩ = tr ad X` for the inner product `metric`.
    pub fn mean_curvature_vector(&self, metric: &Matrix<S>) -> Result<Vec<S>> {
        check_len(self.dim(), metric.rows())?;
        if !metric.is_positive_definite() {
            return Err(Error::NotPositiveDefinite);
        }
        let t = Matrix::from_columns(&[self.ad_traces()], self.dim());
        Ok(metric.solve(&t)?.column(0))
    }

    /// Residual of the derivation identity for `d`.
    pub fn derivation_residual(&self, d: &Matrix<S>) -> f64 {
        let n = self.dim();
        let mut worst: f64 = 0.0;
        for i in 0..n {
            for j in i + 1..n {
                let lhs = d.mul_vec(&self.bracket_basis(i, j));
                let di = d.column(i);
                let dj = d.column(j);
                let mut ei = vec![S::zero(); n];
                ei[i] = S::one();
                let mut ej = vec![S::zero(); n];
                ej[j] = S::one();
                let r1 = self.bracket(&di, &ej).unwrap();
                let r2 = self.bracket(&ei, &dj).unwrap();
                for k in 0..n {
                    let v = lhs[k].clone() - r1[k].clone() - r2[k].clone();
                    worst = worst.max(v.magnitude());
                }
            }
        }
        worst
    }

    /// Basis of the derivation algebra `Der(g)` (null space of the derivation identity).
    pub fn derivations(&self) -> Vec<Matrix<S>> {
        let n = self.dim();
        let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
        // Unknown D[a][b] at index a*n + b; equation rows indexed by (pair, k).
        let mut sys = Matrix::<S>::zeros(pairs.len() * n, n * n);
        for (p, &(i, j)) in pairs.iter().enumerate() {
            for k in 0..n {
                let row = p * n + k;
                // D[e_i,e_j]_k = Σ_l c_ij^l D[k][l]
                for l in 0..n {
                    let c = self.c(i, j, l);
                    if !c.negligible(0.0) {
                        let v = sys[(row, k * n + l)].clone() + c.clone();
                        sys[(row, k * n + l)] = v;
                    }
                }
                // −[D e_i, e_j]_k = −Σ_a D[a][i] c_aj^k
                for a in 0..n {
                    let c = self.c(a, j, k);
                    if !c.negligible(0.0) {
                        let v = sys[(row, a * n + i)].clone() - c.clone();
                        sys[(row, a * n + i)] = v;
                    }
                    let c2 = self.c(i, a, k);
                    if !c2.negligible(0.0) {
                        let v = sys[(row, a * n + j)].clone() - c2.clone();
                        sys[(row, a * n + j)] = v;
                    }
                }
            }
        }
        if pairs.is_empty() {
            sys = Matrix::zeros(1, n * n);
        }
        let ns = sys.null_space(policy().rank_gap);
        (0..ns.cols())
            .map(|c| Matrix::from_fn(n, n, |a, b| ns[(a * n + b, c)].clone()))
            .collect()
    }

    /// `self ⊕ other` with concatenated labels.
    pub fn direct_sum(&self, other: &Self) -> Self {
        let (a, b) = (self.dim(), other.dim());
        let n = a + b;
        let mut c = vec![S::zero(); n * n * n];
        for i in 0..a {
            for j in 0..a {
                for k in 0..a {
                    c[(i * n + j) * n + k] = self.c(i, j, k).clone();
                }
            }
        }
        for i in 0..b {
            for j in 0..b {
                for k in 0..b {
                    c[((a + i) * n + a + j) * n + a + k] = other.c(i, j, k).clone();
                }
            }
        }
        let mut labels = self.labels.clone();
        labels.extend(other.labels.iter().cloned());
        LieAlgebra { labels, c }
    }

    /// Structure constants in the basis given by the columns of `p`.
    pub fn change_basis(&self, p: &Matrix<S>, labels: Vec<String>) -> Result<Self> {
        let n = self.dim();
        check_len(n, p.rows())?;
        check_len(n, p.cols())?;
        check_len(n, labels.len())?;
        let pinv = p.inverse()?;
        let cols = p.columns();
        let mut c = vec![S::zero(); n * n * n];
        for i in 0..n {
            for j in i + 1..n {
                let br = pinv.mul_vec(&self.bracket(&cols[i], &cols[j])?);
                for k in 0..n {
                    c[(i * n + j) * n + k] = br[k].clone();
                    c[(j * n + i) * n + k] = -br[k].clone();
                }
            }
        }
        Self::new(labels, c)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        check_len(self.dim(), labels.len())?;
        self.labels = labels;
        Ok(self)
    }

    pub fn map<T: Scalar>(&self, f: impl Fn(&S) -> T) -> LieAlgebra<T> {
        LieAlgebra {
            labels: self.labels.clone(),
            c: self.c.iter().map(f).collect(),
        }
    }

    pub fn to_f64(&self) -> LieAlgebra<f64> {
        self.map(|x| x.to_f64())
    }

    /// Residual of closure `[span, span] ⊆ span`.
    pub fn closure_residual(&self, span: &[Vec<S>]) -> f64 {
        let n = self.dim();
        let mut gens: Vec<Vec<S>> = span.to_vec();
        let base = self.rank_of(&Matrix::from_columns(&gens, n));
        let mut worst: f64 = 0.0;
        for a in 0..span.len() {
            for b in a + 1..span.len() {
                let br = self.bracket(&span[a], &span[b]).unwrap();
                gens.push(br.clone());
                let r = self.rank_of(&Matrix::from_columns(&gens, n));
                gens.pop();
                if r > base {
                    worst = worst.max(residual_to_span(&br, span));
                }
            }
        }
        worst
    }
}

/// A linearly independent subset spanning the same space as `vs`.
pub(crate) fn span_basis<S: Scalar>(vs: &[Vec<S>], n: usize) -> Vec<Vec<S>> {
    if vs.is_empty() {
        return Vec::new();
    }
    if S::EXACT {
        let m = Matrix::from_rows(vs);
        let (r, piv) = m.rref(0.0);
        (0..piv.len()).map(|i| r.row(i)).collect()
    } else {
        let m = Matrix::from_columns(vs, n).to_f64();
        let svd = crate::linalg::to_na(&m).svd(true, false);
        let u = svd.u.unwrap();
        let top = svd.singular_values.iter().cloned().fold(0.0, f64::max);
        (0..svd.singular_values.len())
            .filter(|&i| svd.singular_values[i] > policy().rank_gap * top && top > 0.0)
            .map(|i| u.column(i).iter().map(|x| S::from_f64(*x)).collect())
            .collect()
    }
}

/// Distance (float) from `v` to the span of `span`, by least squares.
fn residual_to_span<S: Scalar>(v: &[S], span: &[Vec<S>]) -> f64 {
    let n = v.len();
    let a = Matrix::from_columns(span, n).to_f64();
    let b = Matrix::from_columns(&[v.to_vec()], n).to_f64();
    match crate::linalg::least_squares(&a, &b) {
        Ok(x) => a.mul(&x).sub(&b).max_abs(),
        Err(_) => f64::INFINITY,
    }
}

/// Coordinates of matrices in a fixed linearly independent family.
pub(crate) struct MatrixCoordinates<S> {
    rows: Vec<usize>,
    inv: Matrix<S>,
    basis: Vec<Matrix<S>>,
}

impl<S: Scalar> MatrixCoordinates<S> {
    pub fn new(basis: &[Matrix<S>]) -> Result<Self> {
        let n = basis.len();
        let flat: Vec<Vec<S>> = basis.iter().map(|m| m.as_slice().to_vec()).collect();
        let len = flat.first().map_or(0, |f| f.len());
        // Rows of the (len × n) matrix of flattened basis vectors that are independent.
        let big = Matrix::from_columns(&flat, len);
        let (_, piv) = big.transpose().rref(1e-13);
        if piv.len() < n {
            return Err(Error::Premise("matrices are linearly dependent".into()));
        }
        let sub = big.submatrix(&piv, &(0..n).collect::<Vec<_>>());
        Ok(MatrixCoordinates {
            rows: piv,
            inv: sub.inverse()?,
            basis: basis.to_vec(),
        })
    }

    pub fn coordinates(&self, m: &Matrix<S>) -> Result<Vec<S>> {
        let flat = m.as_slice();
        let rhs: Vec<S> = self.rows.iter().map(|&r| flat[r].clone()).collect();
        let x = self.inv.mul_vec(&rhs);
        let mut rebuilt = Matrix::zeros(m.rows(), m.cols());
        for (b, xi) in self.basis.iter().zip(&x) {
            rebuilt = rebuilt.add(&b.scale(xi));
        }
        let tol = if S::EXACT { 0.0 } else { 1e-10 * m.max_abs().max(1.0) };
        if !rebuilt.sub(m).is_zero(tol) {
            return Err(Error::NotSubalgebra {
                residual: rebuilt.sub(m).max_abs(),
            });
        }
        Ok(x)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    fn sl2r() -> LieAlgebra<Rational> {
        let m = |a: [[i64; 2]; 2]| Matrix::from_fn(2, 2, |i, j| rat(a[i][j], 1));
        LieAlgebra::from_matrices(
            vec!["H".into(), "X".into(), "Y".into()],
            &[m([[1, 0], [0, -1]]), m([[0, 1], [-1, 0]]), m([[0, 1], [1, 0]])],
        )
        .unwrap()
    }

    #[test]
    fn sl2_brackets_and_killing() {
        let g = sl2r();
        let x = vec![rat(0, 1), rat(1, 1), rat(0, 1)];
        let y = vec![rat(0, 1), rat(0, 1), rat(1, 1)];
        assert_eq!(g.bracket(&x, &y).unwrap(), vec![rat(2, 1), rat(0, 1), rat(0, 1)]);
        assert_eq!(g.bracket(&x, &x).unwrap(), vec![rat(0, 1); 3]);
        let b = g.killing_form();
        assert_eq!(b[(0, 0)], rat(8, 1));
        assert_eq!(b[(1, 1)], rat(-8, 1));
        assert_eq!(b[(2, 2)], rat(8, 1));
        assert_eq!(b[(0, 1)], rat(0, 1));
        assert!(!g.is_nilpotent());
        assert!(g.is_unimodular());
    }

    #[test]
    fn nilpotency() {
        assert!(LieAlgebra::<Rational>::heisenberg().is_nilpotent());
        assert!(LieAlgebra::<f64>::abelian(4).is_nilpotent());
        assert_eq!(LieAlgebra::<Rational>::heisenberg().lower_central_series_dims(), vec![3, 1, 0]);
    }

    #[test]
    fn mean_curvature_of_affine_algebra() {
        let g = LieAlgebra::<Rational>::from_brackets(
            vec!["e1".into(), "e2".into()],
            &[(0, 1, vec![(1, rat(1, 1))])],
        )
        .unwrap();
        let h = g.mean_curvature_vector(&Matrix::identity(2)).unwrap();
        assert_eq!(h, vec![rat(1, 1), rat(0, 1)]);
        assert!(!g.is_unimodular());
        assert!(LieAlgebra::<Rational>::heisenberg()
            .mean_curvature_vector(&Matrix::identity(3))
            .unwrap()
            .iter()
            .all(|x| *x == rat(0, 1)));
        assert!(g.mean_curvature_vector(&Matrix::zeros(2, 2)).is_err());
    }

    #[test]
    fn rejects_bad_constants() {
        let n = 3;
        let mut c = vec![0.0; n * n * n];
        c[n + 2] = 1.0;
        assert!(matches!(
            LieAlgebra::new(vec!["a".into(), "b".into(), "c".into()], c),
            Err(Error::NotAntisymmetric { .. })
        ));
        // [e1,e2]=e2, [e1,e3]=e3, [e2,e3]=e1 violates Jacobi.
        let bad = LieAlgebra::<Rational>::from_brackets(
            vec!["a".into(), "b".into(), "c".into()],
            &[
                (0, 1, vec![(1, rat(1, 1))]),
                (0, 2, vec![(2, rat(1, 1))]),
                (1, 2, vec![(0, rat(1, 1))]),
            ],
        );
        assert!(matches!(bad, Err(Error::Jacobi { .. })));
    }

    #[test]
    fn heisenberg_derivations() {
        let d = LieAlgebra::<Rational>::heisenberg().derivations();
        // gl(2) acting on span{e1,e2} plus maps into the center: 4 + 2 = 6.
        assert_eq!(d.len(), 6);
        for m in &d {
            assert_eq!(LieAlgebra::<Rational>::heisenberg().derivation_residual(m), 0.0);
        }
    }
}
