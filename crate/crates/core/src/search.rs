//! Multi-start Levenberg–Marquardt search for (generalized) Einstein metrics,
//! and exact sign sweeps over the reduced families.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::catalog::family::{
    computed_combination, computed_r11, displayed_combination, displayed_r11, offdiagonal_entry_formula, MetricFamily,
};
use crate::error::{Error, Result};
use crate::geometry::{combine, coordinates, orthonormal_invariant_forms, random_invariant_metrics, ricci_form, HomogeneousSpace};
use crate::matrix::Matrix;
use crate::parallel::{self, ExecutionMode};
use crate::policy::policy;
use crate::scalar::{format_rational, parse_rational, Dual, Rational, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum Normalization {
    /// Residuals are measured for the rescaled metric with `det g = 1`.
    #[default]
    DetOne,
    /// Residuals are measured for the rescaled metric with `tr g = dim`.
    TraceN,
    /// Family parameterizations solve `det h = 1` for the last scale; form bases fall back to `DetOne`.
    UnitVolumeFrame,
}

impl std::str::FromStr for Normalization {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "detone" | "det-one" | "det1" => Ok(Normalization::DetOne),
            "tracen" | "trace-n" | "trace" => Ok(Normalization::TraceN),
            "unitvolumeframe" | "unit-volume-frame" | "frame" => Ok(Normalization::UnitVolumeFrame),
            _ => Err(Error::Parse(format!("unknown normalization \"{s}\""))),
        }
    }
}

/// How a parameter vector becomes a Gram matrix.
#[derive(Clone, Debug)]
pub enum Parameterization {
    /// Coordinates in an orthonormal basis of invariant symmetric forms.
    Forms(Vec<Matrix<f64>>),
    /// `(a, b, d, e)` of a reduced family, or `(a, b, d)` with `e = 1/(a²b²)`.
    Family(MetricFamily),
}

#[derive(Clone, Debug)]
pub struct SearchProblem {
    pub space: HomogeneousSpace<f64>,
    pub parameterization: Parameterization,
    /// `C_θ` as a form in the stored complement basis; it does not depend on the metric of `U/K`.
    pub c_theta: Option<Matrix<f64>>,
    pub normalization: Normalization,
    pub seed: u64,
    pub starts: usize,
    pub max_iter: usize,
    pub tol: f64,
    pub mode: ExecutionMode,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
pub enum SearchStatus {
    Converged,
    LocalMinPositiveResidual,
    LeftPDCone,
    IterationCap,
}

#[derive(Clone, Debug, Serialize)]
pub struct SearchResult {
    pub start: usize,
    pub parameters: Vec<f64>,
    /// Normalized Gram matrix, row-major.
    pub gram: Vec<Vec<f64>>,
    pub c: f64,
    /// Max-norm of `Ric_op − c·I` for the normalized metric.
    pub residual: f64,
    pub status: SearchStatus,
    pub iterations: usize,
    /// Residual after each iteration.
    pub trace: Vec<f64>,
}

/// Real scalars with the `m`-th root needed by the normalizations.
trait Rooted: Scalar {
    fn root(&self, m: usize) -> Self;
}

impl Rooted for f64 {
    fn root(&self, m: usize) -> Self {
        self.powf(1.0 / m as f64)
    }
}

impl Rooted for Dual {
    fn root(&self, m: usize) -> Self {
        let r = self.v.powf(1.0 / m as f64);
        Dual::new(r, self.d * r / (m as f64 * self.v))
    }
}

impl SearchProblem {
    /// Search over all invariant metrics of `space`.
    pub fn new(space: HomogeneousSpace<f64>) -> Result<Self> {
        let basis = orthonormal_invariant_forms(&space);
        if basis.is_empty() {
            return Err(Error::EmptyParameterSpace);
        }
        Ok(Self::with_parameterization(space, Parameterization::Forms(basis)))
    }

    /// Search over a reduced family.
    pub fn family(space: HomogeneousSpace<f64>, family: MetricFamily) -> Self {
        Self::with_parameterization(space, Parameterization::Family(family))
    }

    fn with_parameterization(space: HomogeneousSpace<f64>, parameterization: Parameterization) -> Self {
        SearchProblem {
            space,
            parameterization,
            c_theta: None,
            normalization: Normalization::DetOne,
            seed: 0,
            starts: 50,
            max_iter: 500,
            tol: policy().convergence,
            mode: ExecutionMode::Parallel,
        }
    }

    pub fn with_c_theta(mut self, form: Matrix<f64>) -> Self {
        self.c_theta = Some(form);
        self
    }

    pub fn num_params(&self) -> usize {
        match (&self.parameterization, self.normalization) {
            (Parameterization::Forms(b), _) => b.len(),
            (Parameterization::Family(_), Normalization::UnitVolumeFrame) => 3,
            (Parameterization::Family(_), _) => 4,
        }
    }

    fn frame_fixed(&self) -> bool {
        matches!(self.parameterization, Parameterization::Family(_)) && self.normalization == Normalization::UnitVolumeFrame
    }

    /// Gram matrix for a parameter vector.
    pub fn gram(&self, x: &[f64]) -> Result<Matrix<f64>> {
        self.gram_generic(x)
    }

    fn gram_generic<S: Scalar>(&self, x: &[S]) -> Result<Matrix<S>> {
        match &self.parameterization {
            Parameterization::Forms(basis) => {
                let b: Vec<Matrix<S>> = basis.iter().map(|m| m.map(|v| S::from_f64(*v))).collect();
                Ok(combine(&b, x))
            }
            Parameterization::Family(f) => {
                let e = if self.frame_fixed() {
                    S::one() / (x[0].clone() * x[0].clone() * x[1].clone() * x[1].clone())
                } else {
                    x[3].clone()
                };
                f.gram(&x[0], &x[1], &x[2], &e)
            }
        }
    }

    /// Normalized residual vector, normalized `c`, and the normalizing scale.
    fn residual_generic<S: Rooted>(&self, space: &HomogeneousSpace<S>, x: &[S]) -> Result<(Vec<S>, S, S)> {
        let g = self.gram_generic(x)?;
        let m = g.rows();
        let mut form = ricci_form(space, &g)?;
        if let Some(t) = &self.c_theta {
            form = form.sub(&t.map(|v| S::from_f64(*v)));
        }
        let op = g.inverse()?.mul(&form);
        let c = op.trace() / S::from_i64(m as i64);
        let e = op.sub(&Matrix::identity(m).scale(&c));
        let s = match self.normalization {
            Normalization::TraceN => g.trace() / S::from_i64(m as i64),
            Normalization::UnitVolumeFrame if self.frame_fixed() => S::one(),
            _ => g.determinant().root(m),
        };
        let r = e.as_slice().iter().map(|v| v.clone() * s.clone()).collect();
        Ok((r, c * s.clone(), s))
    }

    /// Residual evaluation in floating point: `(vector, c, scale)`.
    pub fn evaluate(&self, x: &[f64]) -> Result<(Vec<f64>, f64, f64)> {
        self.residual_generic(&self.space, x)
    }

    /// Jacobian of the residual vector by forward-mode dual numbers.
    pub fn jacobian(&self, x: &[f64]) -> Result<DMatrix<f64>> {
        let dual_space = self.space.map(|v| Dual::constant(*v));
        self.jacobian_with(&dual_space, x)
    }

    fn jacobian_with(&self, dual_space: &HomogeneousSpace<Dual>, x: &[f64]) -> Result<DMatrix<f64>> {
        let k = x.len();
        let mut cols = Vec::with_capacity(k);
        for j in 0..k {
            let xd: Vec<Dual> = x.iter().enumerate().map(|(i, v)| Dual::new(*v, if i == j { 1.0 } else { 0.0 })).collect();
            let (r, _, _) = self.residual_generic(dual_space, &xd)?;
            cols.push(r.iter().map(|d| d.d).collect::<Vec<f64>>());
        }
        let rows = cols.first().map_or(0, |c| c.len());
        Ok(DMatrix::from_fn(rows, k, |i, j| cols[j][i]))
    }

    fn is_admissible(&self, x: &[f64]) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        match &self.parameterization {
            Parameterization::Forms(_) => self.gram(x).map(|g| g.is_positive_definite()).unwrap_or(false),
            Parameterization::Family(_) => {
                let scales = if self.frame_fixed() { &x[..2] } else { x };
                let ok = scales.iter().enumerate().all(|(i, v)| i == 2 || v.abs() > 1e-8);
                ok && self.gram(x).map(|g| g.is_positive_definite()).unwrap_or(false)
            }
        }
    }

    /// Starting points: seeded invariant metrics or seeded family parameters.
    pub fn starting_points(&self) -> Result<Vec<Vec<f64>>> {
        match &self.parameterization {
            Parameterization::Forms(basis) => Ok(random_invariant_metrics(&self.space, self.starts, self.seed)?
                .iter()
                .map(|g| coordinates(basis, g))
                .collect()),
            Parameterization::Family(_) => {
                let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
                Ok((0..self.starts)
                    .map(|_| {
                        let mut v: Vec<f64> = (0..4).map(|_| 2f64.powf(rng.gen_range(-1.5..1.5))).collect();
                        v[2] = rng.gen_range(-2.0..2.0);
                        v.truncate(self.num_params());
                        v
                    })
                    .collect())
            }
        }
    }

    /// Rescale parameters so the Gram matrix has unit normalizing scale.
    fn renormalize(&self, x: &mut [f64], s: f64) {
        if self.frame_fixed() || !(s.is_finite() && s > 0.0) {
            return;
        }
        let f = match self.parameterization {
            Parameterization::Forms(_) => 1.0 / s,
            Parameterization::Family(_) => 1.0 / s.sqrt(),
        };
        for v in x.iter_mut() {
            *v *= f;
        }
    }
}

fn max_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

fn half_sq(v: &[f64]) -> f64 {
    0.5 * v.iter().map(|x| x * x).sum::<f64>()
}

fn minimize(problem: &SearchProblem, dual_space: &HomogeneousSpace<Dual>, start: usize, x0: Vec<f64>) -> SearchResult {
    let mut x = x0;
    let mut trace = Vec::new();
    let mut lambda = 1e-3;
    let mut status = SearchStatus::IterationCap;
    let mut iterations = 0;
    let finish = |x: Vec<f64>, status: SearchStatus, iterations: usize, mut trace: Vec<f64>| -> SearchResult {
        let (r, c, s) = problem.evaluate(&x).unwrap_or((vec![f64::NAN], f64::NAN, 1.0));
        let residual = max_norm(&r);
        if trace.last() != Some(&residual) {
            trace.push(residual);
        }
        let g = problem.gram(&x).map(|g| g.scale(&(1.0 / s))).unwrap_or_else(|_| Matrix::zeros(0, 0));
        let gram = (0..g.rows()).map(|i| g.row(i)).collect();
        SearchResult { start, parameters: x, gram, c, residual, status, iterations, trace }
    };
    if !problem.is_admissible(&x) {
        return finish(x, SearchStatus::LeftPDCone, 0, trace);
    }
    if let Ok((_, _, s)) = problem.evaluate(&x) {
        problem.renormalize(&mut x, s);
    }
    for it in 0..problem.max_iter {
        iterations = it;
        let (r, _, _) = match problem.evaluate(&x) {
            Ok(v) => v,
            Err(_) => {
                status = SearchStatus::LeftPDCone;
                break;
            }
        };
        let res = max_norm(&r);
        trace.push(res);
        if res < problem.tol {
            status = SearchStatus::Converged;
            break;
        }
        let jac = match problem.jacobian_with(dual_space, &x) {
            Ok(j) => j,
            Err(_) => {
                status = SearchStatus::LeftPDCone;
                break;
            }
        };
        let rv = DVector::from_column_slice(&r);
        let jtj = jac.transpose() * &jac;
        let grad = jac.transpose() * &rv;
        let cost = half_sq(&r);
        if grad.amax() <= 1e-15 * (1.0 + cost.sqrt()) {
            status = SearchStatus::LocalMinPositiveResidual;
            break;
        }
        let mut accepted = false;
        let mut left_cone = true;
        for _ in 0..20 {
            let mut a = jtj.clone();
            for i in 0..a.nrows() {
                a[(i, i)] += lambda * (jtj[(i, i)] + 1e-12);
            }
            let Some(delta) = a.lu().solve(&(-&grad)) else {
                lambda *= 10.0;
                continue;
            };
            let mut step: Vec<f64> = delta.iter().copied().collect();
            let mut xn: Vec<f64> = x.iter().zip(&step).map(|(a, b)| a + b).collect();
            let mut halvings = 0;
            while !problem.is_admissible(&xn) && halvings < 30 {
                step.iter_mut().for_each(|s| *s *= 0.5);
                xn = x.iter().zip(&step).map(|(a, b)| a + b).collect();
                halvings += 1;
            }
            if !problem.is_admissible(&xn) {
                lambda *= 10.0;
                continue;
            }
            left_cone = false;
            match problem.evaluate(&xn) {
                Ok((rn, _, s)) if half_sq(&rn) < cost => {
                    x = xn;
                    problem.renormalize(&mut x, s);
                    lambda = (lambda / 3.0).max(1e-15);
                    accepted = true;
                    break;
                }
                _ => lambda *= 4.0,
            }
        }
        if !accepted {
            status = if left_cone { SearchStatus::LeftPDCone } else { SearchStatus::LocalMinPositiveResidual };
            break;
        }
        iterations = it + 1;
    }
    finish(x, status, iterations, trace)
}

/// Run every start and return distinct local minima, best first.
pub fn einstein_search(problem: &SearchProblem) -> Result<Vec<SearchResult>> {
    if problem.num_params() == 0 {
        return Err(Error::EmptyParameterSpace);
    }
    let starts = problem.starting_points()?;
    let dual_space = problem.space.map(|v| Dual::constant(*v));
    let indexed: Vec<(usize, Vec<f64>)> = starts.into_iter().enumerate().collect();
    let mut results = parallel::map(problem.mode, &indexed, |(i, x0)| minimize(problem, &dual_space, *i, x0.clone()));
    if results.iter().all(|r| r.status == SearchStatus::LeftPDCone) {
        return Err(Error::AllStartsLeftCone);
    }
    results.sort_by(|a, b| {
        a.residual
            .total_cmp(&b.residual)
            .then_with(|| a.parameters.partial_cmp(&b.parameters).unwrap_or(std::cmp::Ordering::Equal))
    });
    let mut distinct: Vec<SearchResult> = Vec::new();
    for r in results {
        if r.status == SearchStatus::LeftPDCone {
            continue;
        }
        let same = distinct.iter().any(|d| {
            d.status == r.status
                && d.gram.len() == r.gram.len()
                && d.gram.iter().flatten().zip(r.gram.iter().flatten()).all(|(a, b)| (a - b).abs() <= 1e-6 * (1.0 + a.abs()))
        });
        if !same {
            distinct.push(r);
        }
    }
    Ok(distinct)
}

/// Max relative error between dual-number and central-difference gradients of `½‖r‖²`.
pub fn gradient_check(problem: &SearchProblem, point: &[f64]) -> Result<f64> {
    let (r, _, _) = problem.evaluate(point)?;
    let f0 = half_sq(&r);
    let jac = problem.jacobian(point)?;
    let grad = jac.transpose() * DVector::from_column_slice(&r);
    let mut worst = 0.0f64;
    for k in 0..point.len() {
        let h = 1e-6 * point[k].abs().max(1.0);
        let mut xp = point.to_vec();
        let mut xm = point.to_vec();
        xp[k] += h;
        xm[k] -= h;
        let fp = half_sq(&problem.evaluate(&xp)?.0);
        let fm = half_sq(&problem.evaluate(&xm)?.0);
        let fd = (fp - fm) / (2.0 * h);
        let denom = grad[k].abs().max(fd.abs()).max(1e-6 * (1.0 + f0));
        worst = worst.max((grad[k] - fd).abs() / denom);
    }
    Ok(worst)
}

/// One axis of a rational grid.
#[derive(Clone, Debug, PartialEq)]
pub struct GridAxis {
    pub min: Rational,
    pub max: Rational,
    pub steps: usize,
}

impl GridAxis {
    pub fn nodes(&self) -> Vec<Rational> {
        if self.steps <= 1 {
            return vec![self.min.clone()];
        }
        let step = (self.max.clone() - self.min.clone()) / Rational::from_i64((self.steps - 1) as i64);
        (0..self.steps).map(|i| self.min.clone() + step.clone() * Rational::from_i64(i as i64)).collect()
    }
}

/// `{param: {min, max, steps}}`, endpoints as integers or `"p/q"` strings.
pub fn parse_grid(v: &Value) -> Result<BTreeMap<String, GridAxis>> {
    let obj = v.as_object().ok_or_else(|| Error::Parse("grid spec must be a JSON object".into()))?;
    let rational = |x: &Value| -> Result<Rational> {
        match x {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() => Ok(Rational::from_i64(n.as_i64().unwrap())),
            _ => Err(Error::Parse(format!("grid endpoint {x} must be an integer or a \"p/q\" string"))),
        }
    };
    let mut out = BTreeMap::new();
    for (name, axis) in obj {
        let get = |k: &str| axis.get(k).ok_or_else(|| Error::Parse(format!("grid axis {name} lacks \"{k}\"")));
        let steps = get("steps")?
            .as_u64()
            .filter(|s| *s >= 1)
            .ok_or_else(|| Error::Parse(format!("grid axis {name}: steps must be a positive integer")))?;
        out.insert(name.clone(), GridAxis { min: rational(get("min")?)?, max: rational(get("max")?)?, steps: steps as usize });
    }
    Ok(out)
}

/// Families whose sign claims can be swept exactly.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum SweepFamily {
    /// `(a, b, d)` with `e = 1/(a²b²)`; claim: the two quantities are never both negative.
    ThetaD11,
    /// `(a, b, d, e)`; claim: the off-diagonal entry has the sign of `d`.
    Sl2cEntry,
}

impl SweepFamily {
    pub fn params(self) -> &'static [&'static str] {
        match self {
            SweepFamily::ThetaD11 => &["a", "b", "d"],
            SweepFamily::Sl2cEntry => &["a", "b", "d", "e"],
        }
    }

    pub fn quantities(self) -> &'static [&'static str] {
        match self {
            SweepFamily::ThetaD11 => &["displayed_r11", "displayed_combination", "computed_r11", "computed_combination"],
            SweepFamily::Sl2cEntry => &["offdiagonal_entry"],
        }
    }

    /// The default grid: about 10⁴ nodes.
    pub fn default_grid(self) -> BTreeMap<String, GridAxis> {
        let axis = |a: i64, b: i64, c: i64, d: i64, steps| GridAxis {
            min: crate::scalar::rat(a, b),
            max: crate::scalar::rat(c, d),
            steps,
        };
        let mut g = BTreeMap::new();
        match self {
            SweepFamily::ThetaD11 => {
                g.insert("a".into(), axis(1, 4, 4, 1, 22));
                g.insert("b".into(), axis(1, 4, 4, 1, 22));
                g.insert("d".into(), axis(-3, 1, 3, 1, 22));
            }
            SweepFamily::Sl2cEntry => {
                g.insert("a".into(), axis(1, 3, 3, 1, 10));
                g.insert("b".into(), axis(-3, 1, 3, 1, 10));
                g.insert("d".into(), axis(-2, 1, 2, 1, 10));
                g.insert("e".into(), axis(1, 3, 3, 1, 10));
            }
        }
        g
    }
}

impl std::str::FromStr for SweepFamily {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "theta-d11" | "Sl2RxSl2R/D11-theta" | "Sl2CxSl2R-case-516" => Ok(SweepFamily::ThetaD11),
            "sl2c-u1-entry" | "Sl2C/U1" => Ok(SweepFamily::Sl2cEntry),
            _ => Err(Error::Parse(format!("no sweep family \"{s}\" (try theta-d11 or sl2c-u1-entry)"))),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepNode {
    pub params: Vec<String>,
    pub values: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub family: SweepFamily,
    pub operation: String,
    pub nodes: usize,
    /// Nodes excluded because a scale parameter vanishes.
    pub skipped: usize,
    /// Sign-pattern counts per claim, keyed like `"displayed:-+"`.
    pub tallies: BTreeMap<String, usize>,
    /// Nodes violating a claimed sign invariant, keyed by claim.
    pub counterexamples: BTreeMap<String, Vec<Vec<String>>>,
    #[serde(skip)]
    pub rows: Vec<SweepNode>,
}

impl SweepReport {
    /// Whether no node violates `claim`; unknown claim names are an error.
    pub fn holds(&self, claim: &str) -> Result<bool> {
        match self.counterexamples.get(claim) {
            Some(v) => Ok(v.is_empty()),
            None => Err(Error::Parse(format!(
                "unknown claim {claim:?}; this sweep checks {}",
                self.counterexamples.keys().cloned().collect::<Vec<_>>().join(", ")
            ))),
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "family": self.family,
            "operation": self.operation,
            "nodes": self.nodes,
            "skipped": self.skipped,
            "tallies": self.tallies,
            "counterexamples": self.counterexamples,
        })
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let header: Vec<&str> = self.family.params().iter().chain(self.family.quantities()).copied().collect();
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<&str> = row.params.iter().chain(&row.values).map(|s| s.as_str()).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

fn sign(x: &Rational) -> char {
    if x.is_positive() {
        '+'
    } else if x.negligible(0.0) {
        '0'
    } else {
        '-'
    }
}

/// Evaluate the family's certificates at every grid node in exact arithmetic.
pub fn parameter_sweep(family: SweepFamily, grid: &BTreeMap<String, GridAxis>, mode: ExecutionMode) -> Result<SweepReport> {
    let axes: Vec<Vec<Rational>> = family
        .params()
        .iter()
        .map(|p| {
            grid.get(*p)
                .map(|a| a.nodes())
                .ok_or_else(|| Error::Parse(format!("grid lacks parameter {p}")))
        })
        .collect::<Result<_>>()?;
    if let Some(extra) = grid.keys().find(|k| !family.params().contains(&k.as_str())) {
        return Err(Error::Parse(format!("grid parameter {extra} is not used by this family")));
    }
    let total: usize = axes.iter().map(|a| a.len()).product();
    let node = |mut i: usize| -> Vec<Rational> {
        let mut v = vec![Rational::zero(); axes.len()];
        for k in (0..axes.len()).rev() {
            v[k] = axes[k][i % axes[k].len()].clone();
            i /= axes[k].len();
        }
        v
    };
    let evaluated = parallel::map_range(mode, total, |i| {
        let p = node(i);
        let zero_scale = match family {
            SweepFamily::ThetaD11 => p[0].negligible(0.0) || p[1].negligible(0.0),
            SweepFamily::Sl2cEntry => p[0].negligible(0.0) || p[1].negligible(0.0) || p[3].negligible(0.0),
        };
        if zero_scale {
            return None;
        }
        let values = match family {
            SweepFamily::ThetaD11 => {
                let e = Rational::one() / (p[0].clone() * p[0].clone() * p[1].clone() * p[1].clone());
                vec![
                    displayed_r11(&p[0], &p[1], &p[2], &e),
                    displayed_combination(&p[0], &p[1], &p[2], &e),
                    computed_r11(&p[0], &p[1], &p[2], &e),
                    computed_combination(&p[0], &p[1], &p[2], &e),
                ]
            }
            SweepFamily::Sl2cEntry => vec![offdiagonal_entry_formula(&p[0], &p[1], &p[2], &p[3])],
        };
        Some((p, values))
    });
    let mut tallies = BTreeMap::new();
    let mut counterexamples: BTreeMap<String, Vec<Vec<String>>> = BTreeMap::new();
    let mut rows = Vec::new();
    let mut skipped = 0;
    let claims: &[&str] = match family {
        SweepFamily::ThetaD11 => &["displayed_not_both_negative", "computed_not_both_negative"],
        SweepFamily::Sl2cEntry => &["entry_sign_is_sign_d"],
    };
    for c in claims {
        counterexamples.insert(c.to_string(), vec![]);
    }
    for item in evaluated {
        let Some((p, v)) = item else {
            skipped += 1;
            continue;
        };
        let ps: Vec<String> = p.iter().map(format_rational).collect();
        match family {
            SweepFamily::ThetaD11 => {
                for (label, pair) in [("displayed", [&v[0], &v[1]]), ("computed", [&v[2], &v[3]])] {
                    let key = format!("{label}:{}{}", sign(pair[0]), sign(pair[1]));
                    *tallies.entry(key).or_insert(0) += 1;
                    if !pair[0].is_positive() && !pair[0].negligible(0.0) && !pair[1].is_positive() && !pair[1].negligible(0.0) {
                        counterexamples.get_mut(&format!("{label}_not_both_negative")).unwrap().push(ps.clone());
                    }
                }
            }
            SweepFamily::Sl2cEntry => {
                let key = format!("entry:{} d:{}", sign(&v[0]), sign(&p[2]));
                *tallies.entry(key).or_insert(0) += 1;
                if sign(&v[0]) != sign(&p[2]) {
                    counterexamples.get_mut("entry_sign_is_sign_d").unwrap().push(ps.clone());
                }
            }
        }
        rows.push(SweepNode { params: ps, values: v.iter().map(format_rational).collect() });
    }
    let operation = match family {
        SweepFamily::ThetaD11 => "theta-d11-sign-sweep",
        SweepFamily::Sl2cEntry => "sl2c-u1-entry-sign-sweep",
    };
    Ok(SweepReport { family, operation: operation.into(), nodes: rows.len(), skipped, tallies, counterexamples, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie::LieAlgebra;

    #[test]
    fn abelian_gradient_is_exact() {
        let space = HomogeneousSpace::lie_group("R3", LieAlgebra::<f64>::abelian(3));
        let problem = SearchProblem::new(space).unwrap();
        let x = problem.starting_points().unwrap().remove(0);
        assert_eq!(gradient_check(&problem, &x).unwrap(), 0.0);
    }

    #[test]
    fn residual_is_scale_invariant() {
        let space = HomogeneousSpace::lie_group("H3", LieAlgebra::<f64>::heisenberg());
        let problem = SearchProblem::new(space).unwrap();
        let x = problem.starting_points().unwrap().remove(0);
        let (r1, c1, _) = problem.evaluate(&x).unwrap();
        let scaled: Vec<f64> = x.iter().map(|v| 3.0 * v).collect();
        let (r2, c2, _) = problem.evaluate(&scaled).unwrap();
        assert!((max_norm(&r1) - max_norm(&r2)).abs() < 1e-12);
        assert!((c1 - c2).abs() < 1e-12);
    }

    #[test]
    fn grid_parses_rational_endpoints() {
        let g = parse_grid(&json!({"a": {"min": "1/2", "max": 2, "steps": 4}})).unwrap();
        let nodes = g["a"].nodes();
        assert_eq!(nodes.len(), 4);
        assert_eq!(nodes[1], crate::scalar::rat(1, 1));
    }

    #[test]
    fn entry_vanishes_on_the_d_zero_slice() {
        let mut grid = SweepFamily::Sl2cEntry.default_grid();
        grid.insert("d".into(), GridAxis { min: Rational::zero(), max: Rational::zero(), steps: 1 });
        let rep = parameter_sweep(SweepFamily::Sl2cEntry, &grid, ExecutionMode::Sequential).unwrap();
        assert!(rep.rows.iter().all(|r| r.values[0] == "0"));
        assert!(rep.holds("entry_sign_is_sign_d").unwrap());
    }
}
