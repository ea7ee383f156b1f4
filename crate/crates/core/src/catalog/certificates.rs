//! Numerical and exact certificates backing the catalog verdicts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{
    combine, coordinates, decompose_isotropy_modules, orthonormal_invariant_forms, random_invariant_metrics, ricci_form,
    ricci_value, HomogeneousSpace, InvariantMetric, ModuleDecomposition, Part,
};
use crate::linalg;
use crate::matrix::Matrix;
use crate::parallel::{self, ExecutionMode};
use crate::policy::policy;
use crate::scalar::Rational;

/// Outcome of one certificate, tagged by the operation that produced it.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CheckReport {
    pub operation: String,
    pub passed: bool,
    /// Numerical support rather than an exact certificate.
    pub evidence: bool,
    pub samples: usize,
    /// Headline quantity, e.g. the minimum found or the worst residual.
    pub value: Option<f64>,
    pub details: Vec<String>,
}

impl CheckReport {
    pub fn new(operation: impl Into<String>) -> Self {
        CheckReport { operation: operation.into(), passed: true, evidence: false, samples: 0, value: None, details: vec![] }
    }

    pub fn note(&mut self, s: impl Into<String>) -> &mut Self {
        self.details.push(s.into());
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum CartanVerdict {
    /// No `q`-block is equivalent to a `p`-block: every invariant metric is Cartan-orthogonal.
    NoEinstein,
    Inconclusive,
    /// No compact directions in the complement (symmetric pairs) or no split recorded.
    NotApplicable,
}

/// Orthogonal-Cartan criterion from the module decomposition.
pub fn cartan_orthogonality_test(space: &HomogeneousSpace<f64>, seed: u64) -> Result<(CartanVerdict, ModuleDecomposition)> {
    let dec = decompose_isotropy_modules(space, seed)?;
    let verdict = if !space.has_cartan() || space.positions(Part::Q).is_empty() || space.positions(Part::P).is_empty() {
        CartanVerdict::NotApplicable
    } else if dec.cartan_parts_share_module() {
        CartanVerdict::Inconclusive
    } else {
        CartanVerdict::NoEinstein
    };
    Ok((verdict, dec))
}

/// Largest entry of `ρ(Z) v` over the isotropy basis.
fn fixed_residual(space: &HomogeneousSpace<f64>, v: &[f64]) -> f64 {
    space
        .isotropy_action()
        .iter()
        .map(|r| r.mul_vec(v).iter().fold(0.0f64, |m, x| m.max(x.abs())))
        .fold(0.0, f64::max)
}

/// Isotropy-fixed vectors inside the span of the given complement positions.
pub fn fixed_vectors(space: &HomogeneousSpace<f64>, positions: &[usize]) -> Vec<Vec<f64>> {
    let m = space.dim();
    let embed = Matrix::from_fn(m, positions.len(), |i, j| if i == positions[j] { 1.0 } else { 0.0 });
    if space.isotropy_action().is_empty() {
        return embed.columns();
    }
    let stacked: Vec<Matrix<f64>> = space.isotropy_action().iter().map(|r| r.mul(&embed)).collect();
    let ns = linalg::svd_null_space(&Matrix::vstack(&stacked), policy().rank_gap);
    embed.mul(&ns).columns()
}

fn bracket_m(space: &HomogeneousSpace<f64>, u: &[f64], v: &[f64]) -> Vec<f64> {
    let m = space.dim();
    let mut out = vec![0.0; m];
    for a in 0..m {
        if u[a] == 0.0 {
            continue;
        }
        for b in 0..m {
            if v[b] == 0.0 {
                continue;
            }
            for (k, o) in out.iter_mut().enumerate() {
                *o += u[a] * v[b] * space.cm(a, b, k);
            }
        }
    }
    out
}

fn dot_g(g: &Matrix<f64>, u: &[f64], v: &[f64]) -> f64 {
    u.iter().zip(g.mul_vec(v)).map(|(a, b)| a * b).sum()
}

fn seed_for(seed: u64, i: usize) -> u64 {
    seed.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(i as u64)
}

/// Random invariant metrics plus a grid along each invariant-form coordinate.
fn sampled_metrics(space: &HomogeneousSpace<f64>, random: usize, seed: u64) -> Result<Vec<Matrix<f64>>> {
    let mut out = random_invariant_metrics(space, random, seed)?;
    let basis = orthonormal_invariant_forms(space);
    let base = out.first().cloned().unwrap_or_else(|| Matrix::identity(space.dim()));
    let x0 = coordinates(&basis, &base);
    for k in 0..basis.len() {
        for step in -4..=4 {
            if step == 0 {
                continue;
            }
            let mut x = x0.clone();
            x[k] *= 2f64.powi(step);
            x[k] += 0.1 * step as f64;
            let g = combine(&basis, &x);
            if g.is_positive_definite() {
                let n = g.max_abs();
                out.push(g.scale(&(1.0 / n)));
            }
        }
    }
    Ok(out)
}

/// Largest `|A ad_Y + ad_Yᵗ A|` over an orthonormal basis `A` of invariant forms.
/// Zero exactly when `ad_Y` is skew-symmetric for every invariant metric.
pub fn skew_symmetry_residual(space: &HomogeneousSpace<f64>, y: &[f64]) -> f64 {
    let ad = space.ad_m_vec(y);
    orthonormal_invariant_forms(space)
        .iter()
        .map(|w| w.mul(&ad).add(&ad.transpose().mul(w)).max_abs())
        .fold(0.0, f64::max)
}

/// Minimum of `Ric(Y, Y)` over sampled invariant metrics for isotropy-fixed
/// directions acting skew-symmetrically for every invariant metric.
pub fn ricci_sign_certificate(
    space: &HomogeneousSpace<f64>,
    directions: &[Vec<f64>],
    samples: usize,
    seed: u64,
    mode: ExecutionMode,
) -> Result<CheckReport> {
    let tol = policy().structural.max(1e-10);
    for (i, y) in directions.iter().enumerate() {
        let residual = fixed_residual(space, y);
        if residual > tol {
            return Err(Error::Premise(format!("direction {i} is not isotropy-fixed (residual {residual:e})")));
        }
        let skew = skew_symmetry_residual(space, y);
        if skew > tol {
            return Err(Error::Premise(format!(
                "direction {i} is not skew-symmetric for every invariant metric (residual {skew:e})"
            )));
        }
    }
    let (mut rep, metrics) = scan(space, directions, samples, seed, mode)?;
    let cross: Vec<Result<f64>> = parallel::map(mode, &metrics, |g| {
        let ric = ricci_form(space, g)?;
        let metric = InvariantMetric::new(space, g.clone())?;
        let mut cross = 0.0f64;
        for y in directions {
            let reduced = crate::geometry::ricci_flat_isotropy(space, &metric, y, y)?;
            cross = cross.max((ricci_value(&ric, y, y) - reduced).abs());
        }
        Ok(cross)
    });
    let mut worst = 0.0f64;
    for c in cross {
        worst = worst.max(c?);
    }
    rep.note(format!("reduced-formula agreement with full Ricci: {worst:.2e}"));
    Ok(rep)
}

/// Minimum of `Ric(Y, Y)/|Y|²` over sampled invariant metrics, with no premise on the directions.
pub fn ricci_direction_scan(
    space: &HomogeneousSpace<f64>,
    directions: &[Vec<f64>],
    samples: usize,
    seed: u64,
    mode: ExecutionMode,
) -> Result<CheckReport> {
    let (mut rep, _) = scan(space, directions, samples, seed, mode)?;
    rep.operation = "ricci-direction-scan".into();
    Ok(rep)
}

fn scan(
    space: &HomogeneousSpace<f64>,
    directions: &[Vec<f64>],
    samples: usize,
    seed: u64,
    mode: ExecutionMode,
) -> Result<(CheckReport, Vec<Matrix<f64>>)> {
    let metrics = sampled_metrics(space, samples, seed)?;
    let values: Vec<Result<f64>> = parallel::map(mode, &metrics, |g| {
        let ric = ricci_form(space, g)?;
        Ok(directions
            .iter()
            .map(|y| ricci_value(&ric, y, y) / dot_g(g, y, y))
            .fold(f64::INFINITY, f64::min))
    });
    let mut min = f64::INFINITY;
    let mut at = 0;
    for (i, v) in values.into_iter().enumerate() {
        let v = v?;
        if v < min {
            min = v;
            at = i;
        }
    }
    let mut rep = CheckReport::new("ricci-sign-isotropy-fixed");
    rep.evidence = true;
    rep.samples = metrics.len();
    rep.value = Some(min);
    rep.passed = min >= -1e-12;
    rep.note(format!("min Ric(Y,Y)/|Y|^2 over {} metrics: {min:.6e}", metrics.len()));
    if !rep.passed {
        let g = &metrics[at];
        let rows: Vec<String> = (0..g.rows())
            .map(|i| (0..g.cols()).map(|j| format!("{:.4}", g[(i, j)])).collect::<Vec<_>>().join(" "))
            .collect();
        rep.note(format!("minimizing gram: [{}]", rows.join("; ")));
    }
    Ok((rep, metrics))
}

/// Orthonormal Milnor frame for a metric on a 3-dimensional unimodular subalgebra
/// spanned by complement vectors. Returns frame vectors and structure constants `λ`
/// with `[A₂,A₃] = λ₁A₁`, `[A₃,A₁] = λ₂A₂`, `[A₁,A₂] = λ₃A₃`.
fn milnor_frame(space: &HomogeneousSpace<f64>, span: &[Vec<f64>], gram3: &Matrix<f64>) -> Result<(Vec<Vec<f64>>, [f64; 3], f64)> {
    let fr = gram3.orthonormal_frame()?;
    let to_m = |c: &[f64]| -> Vec<f64> {
        let mut v = vec![0.0; space.dim()];
        for (k, s) in span.iter().enumerate() {
            for (vi, si) in v.iter_mut().zip(s) {
                *vi += c[k] * si;
            }
        }
        v
    };
    let e: Vec<Vec<f64>> = fr.columns().iter().map(|c| to_m(c)).collect();
    let span_m = Matrix::from_columns(span, space.dim());
    let coords = |v: &[f64]| -> Result<Vec<f64>> {
        let c = linalg::least_squares(&span_m, &Matrix::from_columns(&[v.to_vec()], v.len()))?;
        let sc = c.column(0);
        Ok(fr.inverse()?.mul_vec(&sc))
    };
    let l_cols = [
        coords(&bracket_m(space, &e[1], &e[2]))?,
        coords(&bracket_m(space, &e[2], &e[0]))?,
        coords(&bracket_m(space, &e[0], &e[1]))?,
    ];
    let l = Matrix::from_columns(&l_cols, 3);
    let asym = l.sub(&l.transpose()).max_abs();
    let (vals, mut vecs) = linalg::sym_eigen(&l.symmetrize());
    if vecs.determinant() < 0.0 {
        for r in 0..3 {
            vecs[(r, 2)] = -vecs[(r, 2)];
        }
    }
    let a: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            let c = vecs.column(i);
            let mut v = vec![0.0; space.dim()];
            for (k, ek) in e.iter().enumerate() {
                for (vi, x) in v.iter_mut().zip(ek) {
                    *vi += c[k] * x;
                }
            }
            v
        })
        .collect();
    Ok((a, [vals[0], vals[1], vals[2]], asym))
}

/// Milnor-frame certificate for left-invariant metrics on Sl₂(ℝ): Ricci is
/// `diag(2μ₂μ₃, 2μ₃μ₁, 2μ₁μ₂)` with `μ_i = ½Σλ − λ_i`, and a sign pattern with
/// exactly one negative `λ` rules out `μ₂μ₃ = μ₃μ₁ = μ₁μ₂`.
pub fn milnor_certificate(space: &HomogeneousSpace<f64>, samples: usize, seed: u64) -> Result<CheckReport> {
    if space.dim() != 3 || !space.isotropy().is_empty() {
        return Err(Error::Premise("Milnor frames need a 3-dimensional Lie group".into()));
    }
    let span: Vec<Vec<f64>> = Matrix::identity(3).columns();
    let metrics = random_invariant_metrics(space, samples, seed)?;
    let mut worst_identity = 0.0f64;
    let mut min_rel = f64::INFINITY;
    let mut signs_ok = true;
    for g in &metrics {
        let (a, lam, asym) = milnor_frame(space, &span, g)?;
        if asym > 1e-9 {
            return Err(Error::NotUnimodular);
        }
        let neg = lam.iter().filter(|l| **l < 0.0).count();
        let pos = lam.iter().filter(|l| **l > 0.0).count();
        signs_ok &= (neg == 1 && pos == 2) || (neg == 2 && pos == 1);
        let s = 0.5 * (lam[0] + lam[1] + lam[2]);
        let mu = [s - lam[0], s - lam[1], s - lam[2]];
        let expected = [2.0 * mu[1] * mu[2], 2.0 * mu[2] * mu[0], 2.0 * mu[0] * mu[1]];
        let ric = ricci_form(space, g)?;
        let scale = expected.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        for i in 0..3 {
            for j in 0..3 {
                let v = ricci_value(&ric, &a[i], &a[j]);
                let want = if i == j { expected[i] } else { 0.0 };
                worst_identity = worst_identity.max((v - want).abs() / scale);
            }
        }
        let mean = (expected[0] + expected[1] + expected[2]) / 3.0;
        let spread = expected.iter().map(|v| (v - mean).abs()).fold(0.0, f64::max) / scale;
        min_rel = min_rel.min(spread);
    }
    let mut rep = CheckReport::new("sl2r-milnor-frame");
    rep.samples = metrics.len();
    rep.value = Some(min_rel);
    rep.passed = signs_ok && worst_identity < 1e-9 && min_rel > 0.0;
    rep.note(format!("Ricci = diag(2 mu_j mu_k) in the Milnor frame, worst residual {worst_identity:.2e}"));
    rep.note(format!("structure constants have exactly one sign differing from the others on every sample: {signs_ok}"));
    rep.note(format!("smallest relative Einstein defect over samples: {min_rel:.4e}"));
    Ok(rep)
}

/// Exact check `Ric = −½ B|_p` for the Killing metric of a symmetric pair.
pub fn killing_metric_check(space: &HomogeneousSpace<Rational>) -> Result<CheckReport> {
    let b = space.killing_m().clone();
    if !b.to_f64().is_positive_definite() {
        return Err(Error::Premise("Killing form is not positive on the complement".into()));
    }
    let ric = ricci_form(space, &b)?;
    let residual = ric.add(&b.scale(&crate::scalar::rat(1, 2)));
    let mut rep = CheckReport::new("symmetric-killing-ricci");
    rep.samples = 1;
    rep.value = Some(residual.max_abs());
    rep.passed = residual.is_zero(0.0);
    rep.note(format!("max |Ric + B/2| = {} (exact), Einstein constant -1/2", residual.max_abs()));
    Ok(rep)
}

/// Cross-Ricci identity for `Sl₂(ℝ) × G₁/H`: with `l = m₀^⊥ ⊂ sl₂(ℝ) ⊕ m₀`,
/// `Y_i = A_i + B_i` over a Milnor frame `A_i` and a `tr S S`-diagonal orthonormal
/// basis `X⁰_j` of `m₀`, checks `Ric(X⁰_j, Y_i) = −⟨B_i, X⁰_j⟩(½λ_i² + tr S(ad_m X⁰_j)²)`.
/// The positive factor forces `⟨sl₂(ℝ), m₀⟩ = 0` whenever the cross terms vanish.
pub fn product_forcing_certificate(
    space: &HomogeneousSpace<f64>,
    factor: &[usize],
    samples: usize,
    seed: u64,
    mode: ExecutionMode,
) -> Result<CheckReport> {
    let m = space.dim();
    if factor.len() != 3 {
        return Err(Error::Premise("expected a 3-dimensional sl2(R) factor".into()));
    }
    let g1: Vec<usize> = (0..m).filter(|i| !factor.contains(i)).collect();
    let m0 = fixed_vectors(space, &g1);
    let tol = 1e-10;
    for u in &m0 {
        for v in &m0 {
            let r = bracket_m(space, u, v).iter().fold(0.0f64, |a, x| a.max(x.abs()));
            if r > tol {
                return Err(Error::Premise(format!("N(H)/H is not abelian: [m0, m0]_m has size {r:e}")));
            }
        }
    }
    for &f in factor {
        let e: Vec<f64> = (0..m).map(|i| (i == f) as u8 as f64).collect();
        let r = fixed_residual(space, &e);
        if r > tol {
            return Err(Error::Premise(format!("sl2(R) factor is not fixed by the isotropy ({r:e})")));
        }
    }
    let metrics = random_invariant_metrics(space, samples, seed)?;
    let per: Vec<Result<[f64; 4]>> = parallel::map(mode, &metrics, |g| {
        let m0o = linalg::orthonormalize(&m0, g, 1e-10);
        let unit = |f: usize| -> Vec<f64> { (0..m).map(|i| (i == f) as u8 as f64).collect() };
        let phi = |a: &[f64]| -> Vec<f64> {
            let mut v = a.to_vec();
            for x in &m0o {
                let c = dot_g(g, a, x);
                for (vi, xi) in v.iter_mut().zip(x) {
                    *vi -= c * xi;
                }
            }
            v
        };
        let span: Vec<Vec<f64>> = factor.iter().map(|&f| unit(f)).collect();
        let induced = Matrix::from_fn(3, 3, |i, j| dot_g(g, &phi(&span[i]), &phi(&span[j])));
        let (a, lam, _) = milnor_frame(space, &span, &induced)?;
        let ys: Vec<Vec<f64>> = a.iter().map(|ai| phi(ai)).collect();
        let bs: Vec<Vec<f64>> = ys.iter().zip(&a).map(|(y, ai)| y.iter().zip(ai).map(|(p, q)| p - q).collect()).collect();

        let gm = g.submatrix(&g1, &g1);
        let gm_inv = gm.inverse()?;
        let sym = |x: &[f64]| -> Matrix<f64> {
            let ad = space.ad_m_vec(x).submatrix(&g1, &g1);
            ad.add(&gm_inv.mul(&ad.transpose()).mul(&gm)).scale(&0.5)
        };
        let s0: Vec<Matrix<f64>> = m0o.iter().map(|x| sym(x)).collect();
        let k = m0o.len();
        let q = Matrix::from_fn(k, k, |i, j| s0[i].mul(&s0[j]).trace());
        let (_, rot) = linalg::sym_eigen(&q);
        let xs: Vec<Vec<f64>> = (0..k)
            .map(|j| {
                let mut v = vec![0.0; m];
                for (i, x) in m0o.iter().enumerate() {
                    for (vi, xi) in v.iter_mut().zip(x) {
                        *vi += rot[(i, j)] * xi;
                    }
                }
                v
            })
            .collect();
        let ric = ricci_form(space, g)?;
        let scale = ric.max_abs().max(1.0);
        let (mut derived, mut printed, mut factor_min) = (0.0f64, 0.0f64, f64::INFINITY);
        for x in &xs {
            let s = sym(x);
            let trs2 = s.mul(&s).trace();
            for i in 0..3 {
                let lhs = ricci_value(&ric, x, &ys[i]);
                let bx = dot_g(g, &bs[i], x);
                let f = 0.5 * lam[i] * lam[i] + trs2;
                factor_min = factor_min.min(f);
                derived = derived.max((lhs + bx * f).abs() / scale);
                printed = printed.max((lhs + bx * (lam[i] * lam[i] + trs2)).abs() / scale);
            }
        }
        // Block-diagonal metric: cross terms must vanish identically.
        let split = Matrix::from_fn(m, m, |i, j| {
            if factor.contains(&i) == factor.contains(&j) {
                g[(i, j)]
            } else {
                0.0
            }
        });
        let ric_split = ricci_form(space, &split)?;
        let mut cross = 0.0f64;
        for &f in factor {
            for &j in &g1 {
                cross = cross.max(ric_split[(f, j)].abs());
            }
        }
        Ok([derived, printed, factor_min, cross])
    });
    let (mut derived, mut printed, mut fmin, mut cross) = (0.0f64, 0.0f64, f64::INFINITY, 0.0f64);
    for r in per {
        let [d, p, f, c] = r?;
        derived = derived.max(d);
        printed = printed.max(p);
        fmin = fmin.min(f);
        cross = cross.max(c);
    }
    let mut rep = CheckReport::new("product-forcing-cross-ricci");
    rep.evidence = true;
    rep.samples = metrics.len();
    rep.value = Some(derived);
    rep.passed = derived < 1e-9 && fmin > 0.0 && cross < 1e-9;
    rep.note(format!("dim m0 = {}", m0.len()));
    rep.note(format!("identity Ric(X0_j, Y_i) = -<B_i, X0_j>(lambda_i^2/2 + tr S^2): worst residual {derived:.2e}"));
    rep.note(format!("smallest positive factor lambda_i^2/2 + tr S^2: {fmin:.4e}"));
    rep.note(format!("cross Ricci on block-diagonal metrics: {cross:.2e}"));
    rep.note(format!(
        "variant with factor lambda_i^2 + tr S^2 (unit coefficient on lambda^2) deviates by up to {printed:.3e}"
    ));
    Ok(rep)
}

/// Cosine of the largest principal angle-type coupling between the images of
/// `q` and `p` under `φ`, measured in the metric `g`.
fn conjugated_cross(
    space: &HomogeneousSpace<f64>,
    g: &Matrix<f64>,
    phi: &Matrix<f64>,
    q: &[usize],
    p: &[usize],
) -> f64 {
    let comp = space.complement();
    let image = |pos: &[usize]| -> Vec<Vec<f64>> {
        pos.iter()
            .map(|&c| {
                let col = phi.column(comp[c]);
                comp.iter().map(|&i| col[i]).collect()
            })
            .collect()
    };
    let qo = linalg::orthonormalize(&image(q), g, 1e-12);
    let po = linalg::orthonormalize(&image(p), g, 1e-12);
    let mut worst = 0.0f64;
    for u in &qo {
        for v in &po {
            worst = worst.max(dot_g(g, u, v).abs());
        }
    }
    worst
}

fn golden<F: Fn(f64) -> f64>(f: F, mut a: f64, mut b: f64) -> (f64, f64) {
    let r = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - r * (b - a);
    let mut d = a + r * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if (b - a).abs() < 1e-13 {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - r * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + r * (b - a);
            fd = f(d);
        }
    }
    if fc < fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Search the conjugates `exp(ad Y)`, `Y` in the isotropy centralizer inside `p`,
/// for a Cartan decomposition that each sampled invariant metric makes orthogonal.
pub fn conjugated_cartan_sweep(space: &HomogeneousSpace<f64>, samples: usize, seed: u64, mode: ExecutionMode) -> Result<CheckReport> {
    let q = space.positions(Part::Q);
    let p = space.positions(Part::P);
    if q.is_empty() || p.is_empty() {
        return Err(Error::Premise("conjugated sweep needs a Cartan split with both parts".into()));
    }
    let p0 = fixed_vectors(space, &p);
    if p0.is_empty() {
        return Err(Error::Premise("no isotropy-fixed directions in p to conjugate by".into()));
    }
    let algebra = space.algebra();
    let ads: Vec<Matrix<f64>> = p0.iter().map(|y| algebra.ad(&space.embed(y))).collect::<Result<_>>()?;
    let metrics = random_invariant_metrics(space, samples, seed)?;
    let range = 6.0;
    let per: Vec<(f64, Vec<f64>)> = parallel::map(mode, &metrics, |g| {
        let cross_at = |t: &[f64]| -> f64 {
            let mut x = Matrix::zeros(algebra.dim(), algebra.dim());
            for (ad, ti) in ads.iter().zip(t) {
                x = x.add(&ad.scale(ti));
            }
            conjugated_cross(space, g, &linalg::expm(&x), &q, &p)
        };
        let mut t = vec![0.0; ads.len()];
        let mut best = cross_at(&t);
        for _round in 0..(if ads.len() == 1 { 1 } else { 6 }) {
            for k in 0..ads.len() {
                let line = |s: f64| {
                    let mut u = t.clone();
                    u[k] = s;
                    cross_at(&u)
                };
                let steps = 240;
                let h = 2.0 * range / steps as f64;
                let (mut bs, mut bv) = (t[k], best);
                for i in 0..=steps {
                    let s = -range + h * i as f64;
                    let v = line(s);
                    if v < bv {
                        bs = s;
                        bv = v;
                    }
                }
                let (s, v) = golden(line, bs - h, bs + h);
                if v < bv {
                    bs = s;
                    bv = v;
                }
                t[k] = bs;
                best = bv;
            }
        }
        (best, t)
    });
    let threshold = 1e-8;
    let ok = per.iter().filter(|(v, _)| *v < threshold).count();
    let worst = per.iter().map(|(v, _)| *v).fold(0.0, f64::max);
    let mut rep = CheckReport::new("conjugated-cartan-sweep");
    rep.evidence = true;
    rep.samples = metrics.len();
    rep.value = Some(worst);
    rep.passed = ok == metrics.len();
    rep.note(format!("conjugating directions: {} isotropy-fixed vectors in p", p0.len()));
    rep.note(format!("orthogonal Cartan decomposition found for {ok}/{} sampled metrics (threshold {threshold:e})", metrics.len()));
    rep.note(format!("worst residual coupling after optimization: {worst:.3e}"));
    if ok < metrics.len() {
        let mut rng = ChaCha8Rng::seed_from_u64(seed_for(seed, 1));
        let i = rng.gen_range(0..per.len());
        rep.note(format!("e.g. sample {i}: best coupling {:.4e} at t = {:?}", per[i].0, per[i].1));
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;
    use crate::scalar::rat;

    #[test]
    fn flat_abelian_direction_has_zero_ricci() {
        let a = LieAlgebra::<f64>::abelian(3);
        let s = HomogeneousSpace::lie_group("R3", a);
        let rep = ricci_sign_certificate(&s, &[vec![1.0, 0.0, 0.0]], 20, 3, ExecutionMode::Sequential).unwrap();
        assert!(rep.passed);
        assert_eq!(rep.value, Some(0.0));
    }

    #[test]
    fn non_skew_direction_is_rejected() {
        let a = LieAlgebra::from_brackets(vec!["e1".into(), "e2".into()], &[(0, 1, vec![(1, rat(1, 1))])]).unwrap();
        let s = HomogeneousSpace::lie_group("aff", a).to_f64();
        assert!(matches!(
            ricci_sign_certificate(&s, &[vec![1.0, 0.0]], 5, 1, ExecutionMode::Sequential),
            Err(Error::Premise(_))
        ));
    }
}
