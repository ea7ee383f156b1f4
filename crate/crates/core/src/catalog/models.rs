//! Exact matrix models of the real Lie algebras in the catalog.
//!
//! Complex matrices are realified entrywise by `a + bi ↦ [[a, b], [−b, a]]`,
//! which is an injective algebra homomorphism, so commutators are preserved.

use crate::matrix::Matrix;
use crate::scalar::{rat, Rational};

pub type M = Matrix<Rational>;

/// Real `n × n` matrix from `(row, col, value)` triples.
pub fn real(n: usize, entries: &[(usize, usize, i64)]) -> M {
    let mut m = M::zeros(n, n);
    for &(i, j, v) in entries {
        m[(i, j)] = m[(i, j)].clone() + rat(v, 1);
    }
    m
}

/// `E_ij`.
pub fn e(n: usize, i: usize, j: usize) -> M {
    real(n, &[(i, j, 1)])
}

/// Realification of a complex `n × n` matrix given by `(row, col, re, im)` triples.
pub fn complex(n: usize, entries: &[(usize, usize, i64, i64)]) -> M {
    let mut m = M::zeros(2 * n, 2 * n);
    for &(i, j, re, im) in entries {
        let (r, c) = (2 * i, 2 * j);
        let add = |m: &mut M, a: usize, b: usize, v: i64| m[(a, b)] = m[(a, b)].clone() + rat(v, 1);
        add(&mut m, r, c, re);
        add(&mut m, r + 1, c + 1, re);
        add(&mut m, r, c + 1, im);
        add(&mut m, r + 1, c, -im);
    }
    m
}

pub fn lin(terms: &[(i64, &M)]) -> M {
    let n = terms[0].1.rows();
    terms
        .iter()
        .fold(M::zeros(n, n), |acc, (c, m)| acc.add(&m.scale(&rat(*c, 1))))
}

/// sl₂(ℝ): `H = diag(1,−1)`, rotation `X`, `Y = E12 + E21`.
pub fn sl2r() -> [M; 3] {
    [
        real(2, &[(0, 0, 1), (1, 1, -1)]),
        real(2, &[(0, 1, 1), (1, 0, -1)]),
        real(2, &[(0, 1, 1), (1, 0, 1)]),
    ]
}

/// sl₂(ℂ) in the ordered basis `Z, Y0, Y1, Y2, X1, X2`.
pub fn sl2c() -> [M; 6] {
    [
        complex(2, &[(0, 0, 0, 1), (1, 1, 0, -1)]),
        complex(2, &[(0, 0, 1, 0), (1, 1, -1, 0)]),
        complex(2, &[(0, 1, 1, 0), (1, 0, 1, 0)]),
        complex(2, &[(0, 1, 0, 1), (1, 0, 0, -1)]),
        complex(2, &[(0, 1, 1, 0), (1, 0, -1, 0)]),
        complex(2, &[(0, 1, 0, 1), (1, 0, 0, 1)]),
    ]
}

/// Basis of su(n) ⊂ u(n): diagonal `i(E_kk − E_{k+1,k+1})`, then
/// `E_ab − E_ba`, `i(E_ab + E_ba)` for `a < b`.
fn su(n: usize, total: usize) -> (Vec<String>, Vec<M>) {
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for k in 0..n - 1 {
        labels.push(format!("T{}", k + 1));
        mats.push(complex(total, &[(k, k, 0, 1), (k + 1, k + 1, 0, -1)]));
    }
    for a in 0..n {
        for b in a + 1..n {
            labels.push(format!("R{}{}", a + 1, b + 1));
            mats.push(complex(total, &[(a, b, 1, 0), (b, a, -1, 0)]));
            labels.push(format!("I{}{}", a + 1, b + 1));
            mats.push(complex(total, &[(a, b, 0, 1), (b, a, 0, 1)]));
        }
    }
    (labels, mats)
}

/// Non-compact directions `E_{a,n} + E_{n,a}`, `i(E_{a,n} − E_{n,a})` of su(n,1).
fn su_n1_p(n: usize) -> (Vec<String>, Vec<M>) {
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for a in 0..n {
        labels.push(format!("P{}", a + 1));
        mats.push(complex(n + 1, &[(a, n, 1, 0), (n, a, 1, 0)]));
        labels.push(format!("Q{}", a + 1));
        mats.push(complex(n + 1, &[(a, n, 0, 1), (n, a, 0, -1)]));
    }
    (labels, mats)
}

/// `i·diag(d)` realified.
pub fn i_diag(d: &[i64]) -> M {
    let entries: Vec<(usize, usize, i64, i64)> = d.iter().enumerate().map(|(k, &v)| (k, k, 0, v)).collect();
    complex(d.len(), &entries)
}

/// su(2,1): su(2) block `T1, R12, I12`, centre `C = i·diag(1,1,−2)`, then `P1, Q1, P2, Q2`.
pub fn su21() -> (Vec<String>, Vec<M>) {
    let (mut labels, mut mats) = su(2, 3);
    labels.push("C".into());
    mats.push(i_diag(&[1, 1, -2]));
    let (pl, pm) = su_n1_p(2);
    labels.extend(pl);
    mats.extend(pm);
    (labels, mats)
}

/// su(3,1): su(3) (8), `C = i·diag(1,1,1,−3)`, then six non-compact directions.
pub fn su31() -> (Vec<String>, Vec<M>) {
    let (mut labels, mut mats) = su(3, 4);
    labels.push("C".into());
    mats.push(i_diag(&[1, 1, 1, -3]));
    let (pl, pm) = su_n1_p(3);
    labels.extend(pl);
    mats.extend(pm);
    (labels, mats)
}

/// sl₃(ℝ): rotations `K12, K13, K23`, then `D1 = diag(1,−1,0)`, `D2 = diag(1,1,−2)`, `S12, S13, S23`.
pub fn sl3r() -> (Vec<String>, Vec<M>) {
    let labels = ["K12", "K13", "K23", "D1", "D2", "S12", "S13", "S23"];
    let mats = vec![
        real(3, &[(0, 1, 1), (1, 0, -1)]),
        real(3, &[(0, 2, 1), (2, 0, -1)]),
        real(3, &[(1, 2, 1), (2, 1, -1)]),
        real(3, &[(0, 0, 1), (1, 1, -1)]),
        real(3, &[(0, 0, 1), (1, 1, 1), (2, 2, -2)]),
        real(3, &[(0, 1, 1), (1, 0, 1)]),
        real(3, &[(0, 2, 1), (2, 0, 1)]),
        real(3, &[(1, 2, 1), (2, 1, 1)]),
    ];
    (labels.iter().map(|s| s.to_string()).collect(), mats)
}

/// so(p,q) with `J = diag(1^p, (−1)^q)`: rotations `K_ij` inside each block,
/// then boosts `B_ij = E_ij + E_ji` with `i ≤ p < j`.
pub fn so_pq(p: usize, q: usize) -> (Vec<String>, Vec<M>) {
    let n = p + q;
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if (i < p) == (j < p) {
                labels.push(format!("K{}{}", i + 1, j + 1));
                mats.push(real(n, &[(i, j, 1), (j, i, -1)]));
            }
        }
    }
    for i in 0..p {
        for j in p..n {
            labels.push(format!("B{}{}", i + 1, j + 1));
            mats.push(real(n, &[(i, j, 1), (j, i, 1)]));
        }
    }
    (labels, mats)
}

/// Matrix of a labelled element.
pub fn pick<'a>(labels: &[String], mats: &'a [M], name: &str) -> &'a M {
    let i = labels.iter().position(|l| l == name).unwrap_or_else(|| panic!("no basis element {name}"));
    &mats[i]
}

/// sp(2,ℝ) as `{[[A, B], [C, −Aᵗ]] : B, C symmetric}` in block form
/// `K = [[S, T], [−T, S]]` (S skew, T symmetric) ⊕ `P = [[P, Q], [Q, −P]]`.
pub fn sp2r() -> (Vec<String>, Vec<M>) {
    let k = |s: i64, t: [[i64; 2]; 2]| {
        let mut m = M::zeros(4, 4);
        let sk = [[0, s], [-s, 0]];
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = rat(sk[i][j], 1);
                m[(i + 2, j + 2)] = rat(sk[i][j], 1);
                m[(i, j + 2)] = rat(t[i][j], 1);
                m[(i + 2, j)] = rat(-t[i][j], 1);
            }
        }
        m
    };
    let p = |pp: [[i64; 2]; 2], qq: [[i64; 2]; 2]| {
        let mut m = M::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                m[(i, j)] = rat(pp[i][j], 1);
                m[(i + 2, j + 2)] = rat(-pp[i][j], 1);
                m[(i, j + 2)] = rat(qq[i][j], 1);
                m[(i + 2, j)] = rat(qq[i][j], 1);
            }
        }
        m
    };
    let z = [[0, 0], [0, 0]];
    let labels = ["T1", "T2", "U1", "U2", "P11", "P22", "P12", "Q11", "Q22", "Q12"];
    let mats = vec![
        k(0, [[1, 0], [0, 0]]),
        k(0, [[0, 0], [0, 1]]),
        k(1, z),
        k(0, [[0, 1], [1, 0]]),
        p([[1, 0], [0, 0]], z),
        p([[0, 0], [0, 1]], z),
        p([[0, 1], [1, 0]], z),
        p(z, [[1, 0], [0, 0]]),
        p(z, [[0, 0], [0, 1]]),
        p(z, [[0, 1], [1, 0]]),
    ];
    (labels.iter().map(|s| s.to_string()).collect(), mats)
}

/// Direct sum of matrix algebras: each factor's elements embedded block-diagonally.
pub fn direct_sum(factors: &[(Vec<String>, Vec<M>)]) -> (Vec<String>, Vec<M>) {
    let sizes: Vec<usize> = factors.iter().map(|f| f.1[0].rows()).collect();
    let mut labels = Vec::new();
    let mut mats = Vec::new();
    for (k, (l, ms)) in factors.iter().enumerate() {
        for (label, m) in l.iter().zip(ms) {
            let blocks: Vec<M> = sizes
                .iter()
                .enumerate()
                .map(|(j, &s)| if j == k { m.clone() } else { M::zeros(s, s) })
                .collect();
            labels.push(label.clone());
            mats.push(M::block_diag(&blocks));
        }
    }
    (labels, mats)
}

/// sl₂(ℝ) with subscripted labels `H_k, X_k, Y_k`.
pub fn sl2r_labelled(k: usize) -> (Vec<String>, Vec<M>) {
    let labels = ["H", "X", "Y"].iter().map(|s| format!("{s}{k}")).collect();
    (labels, sl2r().to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn realification_is_multiplicative() {
        let a = complex(2, &[(0, 1, 1, 2), (1, 0, -3, 1)]);
        let b = complex(2, &[(0, 0, 0, 1), (1, 1, 2, -1)]);
        let ab = a.mul(&b);
        let expected = complex(2, &[(0, 1, 4, 3), (1, 0, -1, -3)]);
        assert_eq!(ab, expected);
    }

    #[test]
    fn models_are_traceless() {
        for m in sl2c().iter().chain(su21().1.iter()).chain(sl3r().1.iter()).chain(sp2r().1.iter()) {
            assert_eq!(m.trace(), rat(0, 1));
        }
    }
}
