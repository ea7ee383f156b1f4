//! Structure-constant constructors for every catalog row.

use crate::catalog::models::{self as md, lin, pick, M};
use crate::error::{Error, Result};
use crate::geometry::HomogeneousSpace;
use crate::lie::LieAlgebra;
use crate::matrix::Matrix;
use crate::scalar::{rat, Rational};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Role {
    K,
    Q,
    P,
}

/// A matrix model with each basis element tagged as isotropy, `q` or `p`.
#[derive(Default)]
pub struct Model {
    labels: Vec<String>,
    mats: Vec<M>,
    roles: Vec<Role>,
    /// Labels of a separate sl₂(ℝ) factor, for product-type rows.
    factor: Vec<String>,
}

impl Model {
    fn push(&mut self, label: impl Into<String>, m: M, role: Role) -> &mut Self {
        self.labels.push(label.into());
        self.mats.push(m);
        self.roles.push(role);
        self
    }

    fn k(&mut self, l: impl Into<String>, m: M) -> &mut Self {
        self.push(l, m, Role::K)
    }

    fn q(&mut self, l: impl Into<String>, m: M) -> &mut Self {
        self.push(l, m, Role::Q)
    }

    fn p(&mut self, l: impl Into<String>, m: M) -> &mut Self {
        self.push(l, m, Role::P)
    }

    /// Assemble the homogeneous space: isotropy first, then the complement in model order.
    pub fn build(self, name: &str) -> Result<Built> {
        let mut order: Vec<usize> = (0..self.labels.len()).filter(|&i| self.roles[i] == Role::K).collect();
        let h = order.len();
        order.extend((0..self.labels.len()).filter(|&i| self.roles[i] != Role::K));
        let labels: Vec<String> = order.iter().map(|&i| self.labels[i].clone()).collect();
        let mats: Vec<M> = order.iter().map(|&i| self.mats[i].clone()).collect();
        let roles: Vec<Role> = order.iter().map(|&i| self.roles[i]).collect();
        let algebra = LieAlgebra::from_matrices(labels.clone(), &mats)?;
        let n = labels.len();
        let q: Vec<usize> = (h..n).filter(|&i| roles[i] == Role::Q).collect();
        let p: Vec<usize> = (h..n).filter(|&i| roles[i] == Role::P).collect();
        let space = HomogeneousSpace::new(name, algebra, (0..h).collect(), (h..n).collect())?.with_cartan(&q, &p)?;
        let factor = self
            .factor
            .iter()
            .map(|l| labels[h..].iter().position(|x| x == l).expect("factor label in complement"))
            .collect();
        Ok(Built { space, matrices: mats, factor })
    }
}

/// Output of a row constructor.
pub struct Built {
    pub space: HomogeneousSpace<Rational>,
    /// Matrix model of each algebra basis element, in algebra order.
    pub matrices: Vec<M>,
    /// Complement positions of a separate sl₂(ℝ) factor.
    pub factor: Vec<usize>,
}

fn zero(n: usize) -> M {
    M::zeros(n, n)
}

/// Embed one factor's matrix into a block-diagonal direct sum.
fn slot(m: &M, sizes: &[usize], k: usize) -> M {
    let blocks: Vec<M> = sizes.iter().enumerate().map(|(j, &s)| if j == k { m.clone() } else { zero(s) }).collect();
    M::block_diag(&blocks)
}

/// Integer basis of `{x : Σ c_i x_i = 0}` for a nonzero integer vector `c`.
fn kernel(c: &[i64]) -> Vec<Vec<Rational>> {
    let row = Matrix::from_rows(&[c.iter().map(|&v| rat(v, 1)).collect::<Vec<_>>()]);
    let ns = row.null_space_rref(0.0);
    (0..ns.cols()).map(|j| ns.column(j)).collect()
}

fn combo(coeffs: &[Rational], mats: &[&M]) -> M {
    let n = mats[0].rows();
    coeffs.iter().zip(mats).fold(zero(n), |acc, (c, m)| acc.add(&m.scale(c)))
}

fn lie_group_sl2r() -> Model {
    let [h, x, y] = md::sl2r();
    let mut m = Model::default();
    m.p("H", h).q("X", x).p("Y", y);
    m
}

fn sl2c_elements() -> Vec<(&'static str, M)> {
    let names = ["Z", "Y0", "Y1", "Y2", "X1", "X2"];
    names.into_iter().zip(md::sl2c()).collect()
}

fn lie_group_sl2c() -> Model {
    let mut m = Model::default();
    for (l, mat) in sl2c_elements() {
        if l.starts_with('Y') {
            m.p(l, mat);
        } else {
            m.q(l, mat);
        }
    }
    m
}

fn lie_group_sl2r2() -> Model {
    let (labels, mats) = md::direct_sum(&[md::sl2r_labelled(1), md::sl2r_labelled(2)]);
    let mut m = Model::default();
    for (l, mat) in labels.into_iter().zip(mats) {
        if l.starts_with('X') {
            m.q(l, mat);
        } else {
            m.p(l, mat);
        }
    }
    m
}

fn su21_roles(m: &mut Model, isotropy: &[&str], skip: &[&str]) {
    let (labels, mats) = md::su21();
    for (l, mat) in labels.into_iter().zip(mats) {
        if skip.contains(&l.as_str()) {
            continue;
        }
        if isotropy.contains(&l.as_str()) {
            m.k(l, mat);
        } else if l.starts_with('P') || l.starts_with('Q') {
            m.p(l, mat);
        } else {
            m.q(l, mat);
        }
    }
}

fn su31_roles(m: &mut Model, isotropy_su3: bool, c_in_isotropy: bool) {
    let (labels, mats) = md::su31();
    for (l, mat) in labels.into_iter().zip(mats) {
        let noncompact = l.starts_with('P') || l.starts_with('Q');
        if noncompact {
            m.p(l, mat);
        } else if l == "C" {
            if c_in_isotropy {
                m.k(l, mat);
            } else {
                m.q(l, mat);
            }
        } else if isotropy_su3 {
            m.k(l, mat);
        } else {
            m.q(l, mat);
        }
    }
}

fn sl3r_roles(m: &mut Model, isotropy: &[&str], compact_in_q: bool) {
    let (labels, mats) = md::sl3r();
    for (l, mat) in labels.into_iter().zip(mats) {
        if isotropy.contains(&l.as_str()) {
            m.k(l, mat);
        } else if l.starts_with('K') {
            if compact_in_q {
                m.q(l, mat);
            } else {
                m.k(l, mat);
            }
        } else {
            m.p(l, mat);
        }
    }
}

/// so(4,1) rotations recombined into su(2)_L ⊕ su(2)_R, then the four boosts.
fn so41_quaternionic() -> (Vec<(String, M)>, Vec<(String, M)>, Vec<(String, M)>) {
    let (labels, mats) = md::so_pq(4, 1);
    let g = |n: &str| pick(&labels, &mats, n).clone();
    let (k12, k13, k14, k23, k24, k34) = (g("K12"), g("K13"), g("K14"), g("K23"), g("K24"), g("K34"));
    let left = vec![
        ("L1".to_string(), lin(&[(1, &k12), (1, &k34)])),
        ("L2".to_string(), lin(&[(1, &k13), (-1, &k24)])),
        ("L3".to_string(), lin(&[(1, &k14), (1, &k23)])),
    ];
    let right = vec![
        ("R1".to_string(), lin(&[(1, &k12), (-1, &k34)])),
        ("R2".to_string(), lin(&[(1, &k13), (1, &k24)])),
        ("R3".to_string(), lin(&[(1, &k14), (-1, &k23)])),
    ];
    let boosts = labels
        .iter()
        .zip(&mats)
        .filter(|(l, _)| l.starts_with('B'))
        .map(|(l, m)| (l.clone(), m.clone()))
        .collect();
    (left, right, boosts)
}

fn need(params: &[i64], n: usize, name: &str) -> Result<()> {
    if params.len() != n {
        return Err(Error::ParamConstraint(format!("{name} takes {n} integer parameters, got {}", params.len())));
    }
    Ok(())
}

/// Construct the model of a catalog row. Parameter constraints are checked by the caller.
pub fn model(name: &str, params: &[i64]) -> Result<Model> {
    let mut m = Model::default();
    match name {
        "Sl2R" => return Ok(lie_group_sl2r()),
        "Sl2C" => return Ok(lie_group_sl2c()),
        "Sl2RxSl2R" => return Ok(lie_group_sl2r2()),
        "SU21" => su21_roles(&mut m, &[], &[]),
        "Sl3R" => sl3r_roles(&mut m, &[], true),
        "Sl2R/SO2" => {
            let [h, x, y] = md::sl2r();
            m.p("H", h).k("X", x).p("Y", y);
        }
        "Sl2C/SU2" => {
            for (l, mat) in sl2c_elements() {
                if l.starts_with('Y') {
                    m.p(l, mat);
                } else {
                    m.k(l, mat);
                }
            }
        }
        "SU21/U2" => su21_roles(&mut m, &["T1", "R12", "I12", "C"], &[]),
        "SO41/SO4" | "SO32/SO3xSO2" => {
            let (p, q) = if name == "SO41/SO4" { (4, 1) } else { (3, 2) };
            let (labels, mats) = md::so_pq(p, q);
            for (l, mat) in labels.into_iter().zip(mats) {
                if l.starts_with('K') {
                    m.k(l, mat);
                } else {
                    m.p(l, mat);
                }
            }
        }
        "Sl3R/SO3" => sl3r_roles(&mut m, &[], false),
        "Sp2R/U2" | "Sp2R/T2" => {
            let (labels, mats) = md::sp2r();
            for (l, mat) in labels.into_iter().zip(mats) {
                if l.starts_with('T') || (l.starts_with('U') && name == "Sp2R/U2") {
                    m.k(l, mat);
                } else if l.starts_with('U') {
                    m.q(l, mat);
                } else {
                    m.p(l, mat);
                }
            }
        }
        "SU31/U3" => su31_roles(&mut m, true, true),
        "SU31/SU3" => su31_roles(&mut m, true, false),
        "Sl2C/U1" | "Sl2C/U1-theta" => {
            for (l, mat) in sl2c_elements() {
                match l {
                    "Z" => m.k(l, mat),
                    _ if l.starts_with('Y') => m.p(l, mat),
                    _ => m.q(l, mat),
                };
            }
        }
        "Sl2RxSl2R/Dpq" | "Sl2RxSl2R/D11-theta" => {
            let (p, q) = if name == "Sl2RxSl2R/Dpq" {
                need(params, 2, name)?;
                (params[0], params[1])
            } else {
                (1, 1)
            };
            let [h, x, y] = md::sl2r();
            let s = [2, 2];
            let pair = |a: &M, b: &M| slot(a, &s, 0).add(&slot(b, &s, 1));
            let sc = |c: i64, a: &M| a.scale(&rat(c, 1));
            m.k("Z", pair(&sc(p, &x), &sc(q, &x)))
                .q("X0", pair(&sc(q, &x), &sc(-p, &x)))
                .p("Y1", slot(&h, &s, 0))
                .p("Y2", slot(&y, &s, 0))
                .p("X1", slot(&h, &s, 1))
                .p("X2", slot(&y, &s, 1));
        }
        "SU21/SU2" => su21_roles(&mut m, &["T1", "R12", "I12"], &[]),
        "SU21/T2" => su21_roles(&mut m, &["T1", "C"], &[]),
        "SU21/Dpq" => {
            need(params, 2, name)?;
            let (p, q) = (params[0], params[1]);
            su21_roles(&mut m, &[], &["T1", "C"]);
            m.k("h", md::i_diag(&[p, q, -p - q]));
            m.q("q0", md::i_diag(&[p + 2 * q, -(2 * p + q), p - q]));
        }
        "Sp11/Sp1U1" | "Sp11/Sp1" | "Sp11/T2" => {
            let (left, right, boosts) = so41_quaternionic();
            for (i, (l, mat)) in left.into_iter().enumerate() {
                if name != "Sp11/T2" || i == 0 {
                    m.k(l, mat);
                } else {
                    m.q(l, mat);
                }
            }
            for (i, (l, mat)) in right.into_iter().enumerate() {
                if i == 0 && name != "Sp11/Sp1" {
                    m.k(l, mat);
                } else {
                    m.q(l, mat);
                }
            }
            for (l, mat) in boosts {
                m.p(l, mat);
            }
        }
        "SO41/SO3" | "SO32/SO3" => {
            let (p, q) = if name == "SO41/SO3" { (4, 1) } else { (3, 2) };
            let (labels, mats) = md::so_pq(p, q);
            for (l, mat) in labels.into_iter().zip(mats) {
                if ["K12", "K13", "K23"].contains(&l.as_str()) {
                    m.k(l, mat);
                } else if l.starts_with('K') {
                    m.q(l, mat);
                } else {
                    m.p(l, mat);
                }
            }
        }
        "Sl3R/SO2" => sl3r_roles(&mut m, &["K12"], true),
        "SU21xSl2R/Dpq" => {
            need(params, 2, name)?;
            let (p, q) = (params[0], params[1]);
            let (labels, mats) = md::direct_sum(&[md::su21(), md::sl2r_labelled(0)]);
            let c = pick(&labels, &mats, "C").clone();
            let xr = pick(&labels, &mats, "X0").clone();
            for (l, mat) in labels.iter().zip(&mats) {
                match l.as_str() {
                    "T1" | "R12" | "I12" => {
                        m.k(l.clone(), mat.clone());
                    }
                    "C" | "X0" => {}
                    _ => {
                        m.p(l.clone(), mat.clone());
                    }
                }
            }
            m.k("h", lin(&[(p, &c), (q, &xr)]));
            m.q("q0", lin(&[(q, &c), (-p, &xr)]));
        }
        "Sl2R3/DabcT2" | "Sl2R3/Da1a2a3U1" => {
            need(params, 3, name)?;
            let (labels, mats) = md::direct_sum(&[md::sl2r_labelled(1), md::sl2r_labelled(2), md::sl2r_labelled(3)]);
            let xs: Vec<&M> = ["X1", "X2", "X3"].iter().map(|l| pick(&labels, &mats, l)).collect();
            let line = combo(&params.iter().map(|&v| rat(v, 1)).collect::<Vec<_>>(), &xs);
            let ker: Vec<M> = kernel(params).iter().map(|c| combo(c, &xs)).collect();
            if name == "Sl2R3/DabcT2" {
                for (i, k) in ker.into_iter().enumerate() {
                    m.k(format!("h{}", i + 1), k);
                }
                m.q("q0", line);
            } else {
                m.k("h", line);
                for (i, k) in ker.into_iter().enumerate() {
                    m.q(format!("q0{}", i + 1), k);
                }
            }
            for (l, mat) in labels.into_iter().zip(mats) {
                if !l.starts_with('X') {
                    m.p(l, mat);
                }
            }
        }
        "Sl2RxSl2C/Dpq" => {
            need(params, 2, name)?;
            let (p, q) = (params[0], params[1]);
            let s = [2, 4];
            let [hr, xr, yr] = md::sl2r();
            let z = md::sl2c()[0].clone();
            m.k("h", lin(&[(p, &slot(&xr, &s, 0)), (q, &slot(&z, &s, 1))]));
            m.q("q0", lin(&[(q, &slot(&xr, &s, 0)), (-p, &slot(&z, &s, 1))]));
            m.p("Hr", slot(&hr, &s, 0)).p("Yr", slot(&yr, &s, 0));
            for (l, mat) in sl2c_elements().into_iter().skip(1) {
                let e = slot(&mat, &s, 1);
                if l.starts_with('Y') {
                    m.p(l, e);
                } else {
                    m.q(l, e);
                }
            }
        }
        "Sl2RxSl2C/U1" => {
            let s = [2, 4];
            let [hr, xr, yr] = md::sl2r();
            m.p("Hr", slot(&hr, &s, 0)).q("Xr", slot(&xr, &s, 0)).p("Yr", slot(&yr, &s, 0));
            for (l, mat) in sl2c_elements() {
                let e = slot(&mat, &s, 1);
                match l {
                    "Z" => m.k(l, e),
                    _ if l.starts_with('Y') => m.p(l, e),
                    _ => m.q(l, e),
                };
            }
            m.factor = vec!["Hr".into(), "Xr".into(), "Yr".into()];
        }
        "Sl2Rx(Sl2RxSl2R)/Dpq" => {
            need(params, 2, name)?;
            let (p, q) = (params[0], params[1]);
            let (labels, mats) = md::direct_sum(&[md::sl2r_labelled(1), md::sl2r_labelled(2), md::sl2r_labelled(3)]);
            let g = |l: &str| pick(&labels, &mats, l).clone();
            m.p("H1", g("H1")).q("X1", g("X1")).p("Y1", g("Y1"));
            m.k("h", lin(&[(p, &g("X2")), (q, &g("X3"))]));
            m.q("q0", lin(&[(q, &g("X2")), (-p, &g("X3"))]));
            for l in ["H2", "Y2", "H3", "Y3"] {
                m.p(l, g(l));
            }
            m.factor = vec!["H1".into(), "X1".into(), "Y1".into()];
        }
        "Sl2RxSU21/SU2" => {
            let (labels, mats) = md::direct_sum(&[md::sl2r_labelled(0), md::su21()]);
            for (l, mat) in labels.into_iter().zip(mats) {
                match l.as_str() {
                    "T1" | "R12" | "I12" => m.k(l, mat),
                    "X0" | "C" => m.q(l, mat),
                    _ => m.p(l, mat),
                };
            }
            m.factor = vec!["H0".into(), "X0".into(), "Y0".into()];
        }
        _ => {
            return Err(Error::Premise(format!("catalog row {name} has no constructor")));
        }
    }
    Ok(m)
}
