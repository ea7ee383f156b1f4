use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::geometry::metrics::invariant_inner_product;
use crate::geometry::space::{HomogeneousSpace, Part};
use crate::linalg;
use crate::matrix::Matrix;
use crate::policy::policy;

/// One ad(k)-invariant block of the complement.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuleBlock {
    pub label: String,
    pub part: Part,
    /// Basis vectors in complement coordinates.
    pub span: Vec<Vec<f64>>,
    pub trivial: bool,
}

impl ModuleBlock {
    pub fn dim(&self) -> usize {
        self.span.len()
    }
}

/// A pair of equivalent blocks with a basis of intertwiners `T: a → b`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Equivalence {
    pub a: usize,
    pub b: usize,
    pub intertwiners: Vec<Matrix<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ModuleDecomposition {
    pub space: String,
    pub blocks: Vec<ModuleBlock>,
    pub equivalences: Vec<Equivalence>,
    /// Set when an eigenvalue gap was too small to separate blocks with confidence.
    pub ambiguous: bool,
    pub seed: u64,
}

/// Block shape used to compare decompositions independently of basis and labels.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct SignatureBlock {
    pub part: Part,
    pub dim: usize,
    pub trivial: bool,
}

/// Multiset of equivalence classes of blocks. Trivial blocks of one part are
/// merged and all trivial blocks form a single class.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModuleSignature {
    pub classes: Vec<Vec<SignatureBlock>>,
}

impl ModuleSignature {
    pub fn new(blocks: &[SignatureBlock], equivalent: &[(usize, usize)]) -> Self {
        let n = blocks.len();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], i: usize) -> usize {
            let mut r = i;
            while p[r] != r {
                r = p[r];
            }
            p[i] = r;
            r
        }
        for &(a, b) in equivalent {
            if blocks[a].trivial || blocks[b].trivial {
                continue;
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            parent[ra] = rb;
        }
        let mut trivial: Vec<SignatureBlock> = Vec::new();
        for b in blocks.iter().filter(|b| b.trivial) {
            match trivial.iter_mut().find(|t| t.part == b.part) {
                Some(t) => t.dim += b.dim,
                None => trivial.push(b.clone()),
            }
        }
        let mut classes: Vec<Vec<SignatureBlock>> = Vec::new();
        let mut roots: Vec<usize> = Vec::new();
        for i in 0..n {
            if blocks[i].trivial {
                continue;
            }
            let r = find(&mut parent, i);
            match roots.iter().position(|&x| x == r) {
                Some(k) => classes[k].push(blocks[i].clone()),
                None => {
                    roots.push(r);
                    classes.push(vec![blocks[i].clone()]);
                }
            }
        }
        if !trivial.is_empty() {
            classes.push(trivial);
        }
        for c in &mut classes {
            c.sort();
        }
        classes.sort();
        ModuleSignature { classes }
    }

    pub fn total_dim(&self) -> usize {
        self.classes.iter().flatten().map(|b| b.dim).sum()
    }
}

impl std::fmt::Display for ModuleSignature {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let classes: Vec<String> = self
            .classes
            .iter()
            .map(|c| {
                let parts: Vec<String> = c
                    .iter()
                    .map(|b| format!("{}({}){}", b.part.symbol(), b.dim, if b.trivial { "*" } else { "" }))
                    .collect();
                parts.join("≃")
            })
            .collect();
        write!(f, "{}", classes.join(" ⊕ "))
    }
}

impl ModuleDecomposition {
    pub fn signature(&self) -> ModuleSignature {
        let blocks: Vec<SignatureBlock> = self
            .blocks
            .iter()
            .map(|b| SignatureBlock { part: b.part, dim: b.dim(), trivial: b.trivial })
            .collect();
        let eq: Vec<(usize, usize)> = self.equivalences.iter().map(|e| (e.a, e.b)).collect();
        ModuleSignature::new(&blocks, &eq)
    }

    /// Number of independent invariant symmetric forms predicted by Schur's lemma.
    pub fn schur_form_count(&self) -> usize {
        let t: usize = self.blocks.iter().filter(|b| b.trivial).map(|b| b.dim()).sum();
        let nontrivial = self.blocks.iter().filter(|b| !b.trivial).count();
        let cross: usize = self
            .equivalences
            .iter()
            .filter(|e| !self.blocks[e.a].trivial && !self.blocks[e.b].trivial)
            .map(|e| e.intertwiners.len())
            .sum();
        t * (t + 1) / 2 + nontrivial + cross
    }

    pub fn equivalent(&self, a: &str, b: &str) -> Option<bool> {
        let ia = self.blocks.iter().position(|x| x.label == a)?;
        let ib = self.blocks.iter().position(|x| x.label == b)?;
        Some(self.equivalences.iter().any(|e| (e.a, e.b) == (ia, ib) || (e.a, e.b) == (ib, ia)))
    }

    /// Whether some block of `q` is equivalent to some block of `p`.
    pub fn cartan_parts_share_module(&self) -> bool {
        self.equivalences.iter().any(|e| {
            let (pa, pb) = (self.blocks[e.a].part, self.blocks[e.b].part);
            (pa == Part::Q && pb == Part::P) || (pa == Part::P && pb == Part::Q)
        })
    }
}

fn columns_matrix(span: &[Vec<f64>], m: usize) -> Matrix<f64> {
    Matrix::from_columns(span, m)
}

/// Action of each isotropy element on a block, in the block's own basis.
fn restricted_action(space: &HomogeneousSpace<f64>, span: &[Vec<f64>]) -> Result<Vec<Matrix<f64>>> {
    let v = columns_matrix(span, space.dim());
    space
        .isotropy_action()
        .iter()
        .map(|r| linalg::least_squares(&v, &r.mul(&v)))
        .collect()
}

/// Basis of `{T : T ρ_a(Z) = ρ_b(Z) T for all Z}` with `T` mapping block `a` to block `b`.
pub fn find_intertwiners(space: &HomogeneousSpace<f64>, a: &[Vec<f64>], b: &[Vec<f64>]) -> Result<Vec<Matrix<f64>>> {
    let ca = restricted_action(space, a)?;
    let cb = restricted_action(space, b)?;
    Ok(intertwiners_from_actions(&ca, &cb, a.len(), b.len()))
}

fn intertwiners_from_actions(ca: &[Matrix<f64>], cb: &[Matrix<f64>], da: usize, db: usize) -> Vec<Matrix<f64>> {
    let unknowns = da * db;
    if unknowns == 0 {
        return vec![];
    }
    let mut sys = Matrix::zeros(ca.len().max(1) * unknowns, unknowns);
    for (z, (a, b)) in ca.iter().zip(cb).enumerate() {
        for i in 0..db {
            for j in 0..da {
                let row = z * unknowns + i * da + j;
                for k in 0..da {
                    sys[(row, i * da + k)] += a[(k, j)];
                }
                for k in 0..db {
                    sys[(row, k * da + j)] -= b[(i, k)];
                }
            }
        }
    }
    let ns = linalg::svd_null_space(&sys, policy().rank_gap);
    (0..ns.cols()).map(|c| Matrix::from_vec(db, da, ns.column(c))).collect()
}

/// Split an invariant subspace (columns of `basis`, complement coordinates)
/// into trivial and irreducible pieces. Returns `(spans, trivial flags, ambiguous)`.
fn split_subspace(
    space: &HomogeneousSpace<f64>,
    basis: &Matrix<f64>,
    g0: &Matrix<f64>,
    rng: &mut ChaCha8Rng,
) -> Result<(Vec<(Vec<Vec<f64>>, bool)>, bool)> {
    let d = basis.cols();
    if d == 0 {
        return Ok((vec![], false));
    }
    let gap = policy().rank_gap;
    let actions: Vec<Matrix<f64>> = space
        .isotropy_action()
        .iter()
        .map(|r| linalg::least_squares(basis, &r.mul(basis)))
        .collect::<Result<_>>()?;
    let g = basis.transpose().mul(g0).mul(basis);
    let stacked = if actions.is_empty() { Matrix::zeros(1, d) } else { Matrix::vstack(&actions) };
    let kernel = linalg::svd_null_space(&stacked, gap);
    let mut out = Vec::new();
    if kernel.cols() > 0 {
        out.push((basis.mul(&kernel).columns(), true));
    }
    if kernel.cols() == d {
        return Ok((out, false));
    }
    // g-orthogonal complement of the trivial part, which is again invariant.
    let nbasis = if kernel.cols() == 0 {
        Matrix::identity(d)
    } else {
        linalg::svd_null_space(&kernel.transpose().mul(&g), gap)
    };
    let r = nbasis.cols();
    let c: Vec<Matrix<f64>> = actions
        .iter()
        .map(|a| linalg::least_squares(&nbasis, &a.mul(&nbasis)))
        .collect::<Result<_>>()?;
    let gn = nbasis.transpose().mul(&g).mul(&nbasis);
    let gn_inv = gn.inverse()?;
    let commutant = intertwiners_from_actions(&c, &c, r, r);
    let mut best: Option<(f64, Vec<f64>, Matrix<f64>)> = None;
    for _ in 0..6 {
        let mut x = Matrix::zeros(r, r);
        for k in &commutant {
            x = x.add(&k.scale(&rng.gen_range(-1.0..1.0)));
        }
        let xs = x.add(&gn_inv.mul(&x.transpose()).mul(&gn)).scale(&0.5);
        let (vals, vecs) = linalg::sym_eigen_generalized(&gn.mul(&xs), &gn)?;
        let spread = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
        let min_gap = vals
            .windows(2)
            .map(|w| (w[1] - w[0]) / spread)
            .filter(|g| *g > 1e-6)
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().is_none_or(|b| min_gap > b.0) {
            best = Some((min_gap, vals, vecs));
        }
        if min_gap > 1e-2 {
            break;
        }
    }
    let (min_gap, vals, vecs) = best.expect("at least one draw");
    let spread = vals.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    let mut groups: Vec<Vec<usize>> = vec![vec![0]];
    for i in 1..r {
        if (vals[i] - vals[i - 1]) / spread > 1e-6 {
            groups.push(vec![i]);
        } else {
            groups.last_mut().unwrap().push(i);
        }
    }
    let full = basis.mul(&nbasis).mul(&vecs);
    for grp in groups {
        out.push((grp.iter().map(|&i| full.column(i)).collect(), false));
    }
    Ok((out, min_gap.is_finite() && min_gap < 1e-4))
}

/// Decompose the complement into ad(k)-invariant blocks and record equivalences.
pub fn decompose_isotropy_modules(space: &HomogeneousSpace<f64>, seed: u64) -> Result<ModuleDecomposition> {
    let m = space.dim();
    let g0 = invariant_inner_product(space, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let parts: Vec<Part> = if space.has_cartan() { vec![Part::Q, Part::P] } else { vec![Part::M] };
    let mut blocks = Vec::new();
    let mut ambiguous = false;
    for part in parts {
        let pos = space.positions(part);
        let basis = Matrix::from_fn(m, pos.len(), |i, j| if i == pos[j] { 1.0 } else { 0.0 });
        let (pieces, amb) = split_subspace(space, &basis, &g0, &mut rng)?;
        ambiguous |= amb;
        let mut next = 1;
        for (span, trivial) in pieces {
            let label = if trivial {
                format!("{}0", part.symbol())
            } else {
                next += 1;
                format!("{}{}", part.symbol(), next - 1)
            };
            blocks.push(ModuleBlock { label, part, span, trivial });
        }
    }
    let actions: Vec<Vec<Matrix<f64>>> = blocks
        .iter()
        .map(|b| restricted_action(space, &b.span))
        .collect::<Result<_>>()?;
    let mut equivalences = Vec::new();
    for a in 0..blocks.len() {
        for b in a + 1..blocks.len() {
            if blocks[a].trivial != blocks[b].trivial {
                continue;
            }
            let t = intertwiners_from_actions(&actions[a], &actions[b], blocks[a].dim(), blocks[b].dim());
            if !t.is_empty() {
                equivalences.push(Equivalence { a, b, intertwiners: t });
            }
        }
    }
    Ok(ModuleDecomposition { space: space.name().to_string(), blocks, equivalences, ambiguous, seed })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;

    fn euclidean_motions(n_planes: usize, weights: &[f64]) -> HomogeneousSpace<f64> {
        // u(1) acting on ℝ^{2n} with the given weights on each plane.
        let dim = 1 + 2 * n_planes;
        let mut br = Vec::new();
        for (p, &w) in weights.iter().enumerate() {
            let (x, y) = (1 + 2 * p, 2 + 2 * p);
            br.push((0, x, vec![(y, w)]));
            br.push((0, y, vec![(x, -w)]));
        }
        let labels = (0..dim).map(|i| format!("e{i}")).collect();
        let a = LieAlgebra::from_brackets(labels, &br).unwrap();
        HomogeneousSpace::new("motions", a, vec![0], (1..dim).collect()).unwrap()
    }

    #[test]
    fn equal_weights_are_equivalent() {
        let s = euclidean_motions(2, &[1.0, 1.0]);
        let d = decompose_isotropy_modules(&s, 7).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert!(d.blocks.iter().all(|b| b.dim() == 2 && !b.trivial));
        assert_eq!(d.equivalences.len(), 1);
        assert_eq!(d.equivalences[0].intertwiners.len(), 2);
        assert_eq!(d.schur_form_count(), 4);
    }

    #[test]
    fn distinct_weights_are_not() {
        let s = euclidean_motions(2, &[1.0, 2.0]);
        let d = decompose_isotropy_modules(&s, 7).unwrap();
        assert_eq!(d.blocks.len(), 2);
        assert!(d.equivalences.is_empty());
        assert_eq!(d.schur_form_count(), 2);
    }

    #[test]
    fn opposite_weights_are_equivalent_over_the_reals() {
        let s = euclidean_motions(2, &[1.0, -1.0]);
        let d = decompose_isotropy_modules(&s, 1).unwrap();
        assert_eq!(d.equivalences.len(), 1);
    }

    #[test]
    fn lie_group_is_one_trivial_block() {
        let g = HomogeneousSpace::lie_group("H3", LieAlgebra::<f64>::heisenberg());
        let d = decompose_isotropy_modules(&g, 0).unwrap();
        assert_eq!(d.blocks.len(), 1);
        assert!(d.blocks[0].trivial);
        assert_eq!(d.schur_form_count(), 6);
    }

    #[test]
    fn signature_merges_trivial_blocks() {
        let b = |part, dim, trivial| SignatureBlock { part, dim, trivial };
        let s1 = ModuleSignature::new(&[b(Part::Q, 1, true), b(Part::Q, 2, true), b(Part::P, 2, false)], &[]);
        let s2 = ModuleSignature::new(&[b(Part::Q, 3, true), b(Part::P, 2, false)], &[]);
        assert_eq!(s1, s2);
    }
}
