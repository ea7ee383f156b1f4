//! Independent Ricci oracle built from the Nomizu connection operators.

use hec_core::geometry::HomogeneousSpace;
use hec_core::Matrix;

/// `Ric(X, Y) = tr(Z ↦ R(Z, X)Y)` with `R(X, Y) = [Λ(X), Λ(Y)] − Λ([X, Y]_m) − ad([X, Y]_h)`,
/// computed from the full structure constants in the stored complement basis.
pub fn nomizu_ricci(space: &HomogeneousSpace<f64>, g: &Matrix<f64>) -> Matrix<f64> {
    let alg = space.algebra();
    let m = space.complement().to_vec();
    let h = space.isotropy().to_vec();
    let n = m.len();
    let ginv = g.inverse().expect("metric is invertible");
    // brackets of complement basis vectors, split into m and h coordinates
    let bm = |a: usize, b: usize| -> Vec<f64> { m.iter().map(|&k| *alg.c(m[a], m[b], k)).collect() };
    let bh = |a: usize, b: usize| -> Vec<f64> { h.iter().map(|&k| *alg.c(m[a], m[b], k)).collect() };
    // ad of isotropy element z on m
    let ad_h = |z: &[f64]| -> Matrix<f64> {
        Matrix::from_fn(n, n, |k, b| h.iter().zip(z).map(|(&hi, zi)| zi * alg.c(hi, m[b], m[k])).sum())
    };
    // U(X_a, X_b) through g(U(a,b), Z) = ½(g([Z,a]_m, b) + g(a, [Z,b]_m))
    let gdot = |u: &[f64], v: &[f64]| -> f64 { (0..n).map(|i| (0..n).map(|j| u[i] * g[(i, j)] * v[j]).sum::<f64>()).sum() };
    let mut lam: Vec<Matrix<f64>> = Vec::with_capacity(n);
    for a in 0..n {
        let mut l = Matrix::zeros(n, n);
        for b in 0..n {
            let mut lower = vec![0.0; n];
            for (c, lc) in lower.iter_mut().enumerate() {
                let ea: Vec<f64> = (0..n).map(|i| if i == a { 1.0 } else { 0.0 }).collect();
                let eb: Vec<f64> = (0..n).map(|i| if i == b { 1.0 } else { 0.0 }).collect();
                *lc = 0.5 * (gdot(&bm(c, a), &eb) + gdot(&ea, &bm(c, b)));
            }
            let u: Vec<f64> = (0..n).map(|i| (0..n).map(|j| ginv[(i, j)] * lower[j]).sum()).collect();
            let br = bm(a, b);
            for k in 0..n {
                l[(k, b)] = 0.5 * br[k] + u[k];
            }
        }
        lam.push(l);
    }
    let lam_vec = |x: &[f64]| -> Matrix<f64> {
        let mut out = Matrix::zeros(n, n);
        for (a, xa) in x.iter().enumerate() {
            if *xa != 0.0 {
                out = out.add(&lam[a].scale(xa));
            }
        }
        out
    };
    let curv = |a: usize, b: usize| -> Matrix<f64> {
        let comm = lam[a].mul(&lam[b]).sub(&lam[b].mul(&lam[a]));
        comm.sub(&lam_vec(&bm(a, b))).sub(&ad_h(&bh(a, b)))
    };
    let mut ric = Matrix::zeros(n, n);
    for z in 0..n {
        for x in 0..n {
            let r = curv(z, x);
            for y in 0..n {
                ric[(x, y)] += r[(z, y)];
            }
        }
    }
    ric
}
