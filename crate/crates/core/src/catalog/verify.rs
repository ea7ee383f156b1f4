//! Run catalog recipes and compare each outcome with the expected verdict.

use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};

use crate::catalog::certificates::fixed_vectors;
use crate::catalog::family::{
    computed_combination, computed_r11, displayed_combination, displayed_r11, offdiagonal_entry_formula, MetricFamily,
};
use crate::catalog::theta::theta_structure;
use crate::catalog::{
    build_case, cartan_orthogonality_test, conjugated_cartan_sweep, killing_metric_check, milnor_certificate,
    product_forcing_certificate, ricci_direction_scan, ricci_sign_certificate, rows, skew_symmetry_residual, Case, CaseRecord, CartanVerdict, CheckReport, Verdict,
};
use crate::error::{Error, Result};
use crate::geometry::{decompose_isotropy_modules, invariant_metric_space, ricci_in_frame, Part};
use crate::matrix::Matrix;
use crate::parallel::ExecutionMode;
use crate::policy::policy;
use crate::scalar::{format_rational, rat, Rational, Scalar};
use crate::search::{einstein_search, parameter_sweep, SearchProblem, SearchStatus, SweepFamily};
use crate::structure::{c_theta_form, c_theta_in_frame, moment_map_residual, ricci_theta_in_frame};

#[derive(Clone, Debug, Serialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Largest absolute parameter value when sampling family members.
    pub pmax: i64,
    /// Family members checked per infinite family.
    pub family_members: usize,
    /// Sampled metrics for numerical certificates.
    pub samples: usize,
    /// Random rational points for exact formula checks.
    pub formula_points: usize,
    pub search_starts: usize,
    pub search_iterations: usize,
    pub mode: ExecutionMode,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            seed: 42,
            pmax: 7,
            family_members: 10,
            samples: 200,
            formula_points: 200,
            search_starts: 8,
            search_iterations: 150,
            mode: ExecutionMode::Parallel,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum StepStatus {
    Match,
    /// Rests on a cited theorem; numerical support only.
    Cited,
    /// Open in the literature, or the check could not settle it.
    Open,
    Metadata,
    Mismatch,
}

impl StepStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            StepStatus::Match => "match",
            StepStatus::Cited => "cited",
            StepStatus::Open => "open",
            StepStatus::Metadata => "metadata",
            StepStatus::Mismatch => "MISMATCH",
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct StepReport {
    pub index: usize,
    pub step: String,
    /// Provenance tag of the operation that produced the evidence.
    pub operation: String,
    pub status: StepStatus,
    pub expected: String,
    pub observed: String,
    pub evidence: bool,
    pub details: Vec<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct CaseVerdictReport {
    pub case: String,
    pub row: String,
    pub section: String,
    pub params: Vec<i64>,
    pub expected_verdict: Option<Verdict>,
    pub cited: bool,
    pub status: StepStatus,
    pub steps: Vec<StepReport>,
    /// Disagreements with displayed formulas that do not affect the verdict.
    pub deviations: Vec<String>,
    pub convention: Option<String>,
    pub note: Option<String>,
}

impl CaseVerdictReport {
    pub fn to_json(&self) -> Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::new();
        let verdict = self.expected_verdict.map_or("none".to_string(), |v| v.to_string());
        let _ = writeln!(s, "### {} [{}]", self.case, self.status.as_str());
        let _ = writeln!(s);
        let _ = writeln!(s, "expected verdict: `{verdict}`{}", if self.cited { " (cited)" } else { "" });
        if let Some(c) = &self.convention {
            let _ = writeln!(s, "\nconvention: {c}");
        }
        if let Some(n) = &self.note {
            let _ = writeln!(s, "\nnote: {n}");
        }
        if !self.steps.is_empty() {
            let _ = writeln!(s, "\n| # | step | operation | status | expected | observed |");
            let _ = writeln!(s, "|---|------|-----------|--------|----------|----------|");
            for st in &self.steps {
                let _ = writeln!(
                    s,
                    "| {} | {} | `{}` | {} | {} | {} |",
                    st.index,
                    st.step,
                    st.operation,
                    st.status.as_str(),
                    st.expected,
                    st.observed
                );
            }
            for st in &self.steps {
                for d in &st.details {
                    let _ = writeln!(s, "- step {}: {d}", st.index);
                }
            }
        }
        for d in &self.deviations {
            let _ = writeln!(s, "- deviation: {d}");
        }
        s
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct PaperReport {
    pub config: VerifyConfig,
    pub catalog_version: u32,
    pub cases: Vec<CaseVerdictReport>,
}

impl PaperReport {
    pub fn count(&self, status: StepStatus) -> usize {
        self.cases.iter().filter(|c| c.status == status).count()
    }

    pub fn exit_code(&self) -> i32 {
        if self.count(StepStatus::Mismatch) > 0 {
            1
        } else {
            0
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "config": self.config,
            "catalog_version": self.catalog_version,
            "summary": self.summary(),
            "cases": self.cases.iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    fn summary(&self) -> Value {
        json!({
            "cases": self.cases.len(),
            "match": self.count(StepStatus::Match),
            "cited": self.count(StepStatus::Cited),
            "open": self.count(StepStatus::Open),
            "metadata": self.count(StepStatus::Metadata),
            "mismatch": self.count(StepStatus::Mismatch),
        })
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from("## Catalog verification\n\n");
        let _ = writeln!(
            s,
            "{} cases: {} match, {} cited, {} open, {} metadata, {} mismatch\n",
            self.cases.len(),
            self.count(StepStatus::Match),
            self.count(StepStatus::Cited),
            self.count(StepStatus::Open),
            self.count(StepStatus::Metadata),
            self.count(StepStatus::Mismatch)
        );
        let mut section = String::new();
        for c in &self.cases {
            if c.section != section {
                section = c.section.clone();
                let _ = writeln!(s, "## Section `{section}`\n");
            }
            s.push_str(&c.to_markdown());
            s.push('\n');
        }
        s
    }
}

fn step(index: usize, name: &str, operation: &str, ok: bool, expected: impl Into<String>, observed: impl Into<String>) -> StepReport {
    StepReport {
        index,
        step: name.to_string(),
        operation: operation.to_string(),
        status: if ok { StepStatus::Match } else { StepStatus::Mismatch },
        expected: expected.into(),
        observed: observed.into(),
        evidence: false,
        details: vec![],
    }
}

fn from_check(index: usize, name: &str, rep: CheckReport, pass: StepStatus, expected: &str) -> StepReport {
    let observed = match rep.value {
        Some(v) => format!("{} ({v:.3e})", if rep.passed { "holds" } else { "fails" }),
        None => (if rep.passed { "holds" } else { "fails" }).to_string(),
    };
    StepReport {
        index,
        step: name.to_string(),
        operation: rep.operation.clone(),
        status: if rep.passed { pass } else { StepStatus::Mismatch },
        expected: expected.to_string(),
        observed,
        evidence: rep.evidence,
        details: rep.details,
    }
}

fn random_rational(rng: &mut ChaCha8Rng, nonzero: bool) -> Rational {
    loop {
        let p: i64 = rng.gen_range(-9..=9);
        let q: i64 = rng.gen_range(1..=7);
        if !(nonzero && p == 0) {
            return rat(p, q);
        }
    }
}

/// Check the exact off-diagonal entry formula on random rational metrics of the family.
pub fn offdiagonal_entry_check(case: &Case, points: usize, seed: u64) -> Result<CheckReport> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let fam = MetricFamily::Sl2cU1;
    let mut bad = 0;
    let mut zero_at_d0 = true;
    for i in 0..points {
        let (a, b, e) = (random_rational(&mut rng, true), random_rational(&mut rng, true), random_rational(&mut rng, true));
        let d = if i == 0 { Rational::zero() } else { random_rational(&mut rng, false) };
        let frame = fam.frame(&a, &b, &d, &e)?;
        let ric = ricci_in_frame(&case.space, &frame)?;
        let want = offdiagonal_entry_formula(&a, &b, &d, &e);
        if ric[(1, 4)] != want {
            bad += 1;
        }
        if d.negligible(0.0) && !ric[(1, 4)].negligible(0.0) {
            zero_at_d0 = false;
        }
    }
    let mut rep = CheckReport::new("sl2c-u1-offdiag-entry");
    rep.samples = points;
    rep.value = Some(bad as f64);
    rep.passed = bad == 0 && zero_at_d0;
    rep.note(format!(
        "Ric(h^-1 Y1, h^-1 X2) = 4d((a^2-e^2)^2 + a^2(b^2+d^2))/(a^3 b^2 e^2) exactly at {}/{points} random rational points",
        points - bad
    ));
    rep.note("the bracket is positive, so the entry vanishes iff d = 0 and Einstein metrics are Cartan-orthogonal");
    Ok(rep)
}

/// Exact comparison of the computed `r^θ` entries with the closed forms on the Δ₁,₁ family.
pub struct ThetaIdentityCheck {
    pub points: usize,
    pub r11_matches_computed: usize,
    pub combination_matches_computed: usize,
    pub r11_matches_displayed: usize,
    pub combination_matches_displayed: usize,
}

pub fn theta_d11_identities(case: &Case, points: usize, seed: u64) -> Result<ThetaIdentityCheck> {
    let data = theta_structure(case, Matrix::identity(5))?;
    let fam = MetricFamily::Sl2r2D11;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = ThetaIdentityCheck {
        points,
        r11_matches_computed: 0,
        combination_matches_computed: 0,
        r11_matches_displayed: 0,
        combination_matches_displayed: 0,
    };
    for _ in 0..points {
        let (a, b, d) = (random_rational(&mut rng, true), random_rational(&mut rng, true), random_rational(&mut rng, true));
        let e = Rational::one() / (a.clone() * a.clone() * b.clone() * b.clone());
        let gram = fam.gram(&a, &b, &d, &e)?;
        let frame = fam.frame(&a, &b, &d, &e)?;
        let r = ricci_theta_in_frame(&data, &gram, &frame)?;
        let two = rat(2, 1);
        let comb = r[(0, 0)].clone() + two.clone() * r[(3, 3)].clone() + two * a.clone() / d.clone() * r[(1, 3)].clone();
        out.r11_matches_computed += (r[(0, 0)] == computed_r11(&a, &b, &d, &e)) as usize;
        out.combination_matches_computed += (comb == computed_combination(&a, &b, &d, &e)) as usize;
        out.r11_matches_displayed += (r[(0, 0)] == displayed_r11(&a, &b, &d, &e)) as usize;
        out.combination_matches_displayed += (comb == displayed_combination(&a, &b, &d, &e)) as usize;
    }
    Ok(out)
}

fn expected_cartan(record: &CaseRecord, verdict: Option<&crate::catalog::VerdictRule>) -> CartanVerdict {
    match verdict {
        Some(v) if v.verdict == Verdict::NoEinsteinCartanOrthogonal && !v.cited => CartanVerdict::NoEinstein,
        Some(v) if v.verdict == Verdict::Symmetric => CartanVerdict::NotApplicable,
        _ if record.symmetric => CartanVerdict::NotApplicable,
        _ => CartanVerdict::Inconclusive,
    }
}

fn run_step(case: &Case, index: usize, name: &str, cfg: &VerifyConfig, deviations: &mut Vec<String>) -> Result<StepReport> {
    let record = case.record;
    let rule = record.expected_verdict(&case.params)?;
    let verdict = rule.map(|r| r.verdict);
    let space = case.space.to_f64();
    let seed = cfg.seed;
    Ok(match name {
        "modules" => {
            let dec = decompose_isotropy_modules(&space, seed)?;
            let got = dec.signature();
            let want = record.expected_signature(&case.params)?;
            let mut s = step(index, name, "isotropy-module-signature", got == want, want.to_string(), got.to_string());
            if dec.ambiguous {
                s.details.push("an eigenvalue gap was small while splitting blocks".into());
            }
            s
        }
        "invariant_forms" => {
            let dec = decompose_isotropy_modules(&space, seed)?;
            let n = invariant_metric_space(&case.space).len();
            let want = dec.schur_form_count();
            step(index, name, "invariant-form-count", n == want, format!("{want} (Schur count)"), n.to_string())
        }
        "cartan_orthogonality" => {
            let (got, _) = cartan_orthogonality_test(&space, seed)?;
            let want = expected_cartan(record, rule);
            step(index, name, "cartan-orthogonality-modules", got == want, format!("{want:?}"), format!("{got:?}"))
        }
        "offdiagonal_ricci_entry" => {
            let rep = offdiagonal_entry_check(case, cfg.formula_points, seed)?;
            from_check(index, name, rep, StepStatus::Match, "closed form, zero iff d = 0")
        }
        "ricci_sign" => {
            let dirs = fixed_vectors(&space, &space.positions(Part::Q));
            if dirs.is_empty() {
                return Err(Error::Premise("no isotropy-fixed directions in q".into()));
            }
            let expected = "Ric(Y,Y) >= 0 on q0";
            match ricci_sign_certificate(&space, &dirs, cfg.samples, seed, cfg.mode) {
                Ok(rep) => from_check(index, name, rep, StepStatus::Match, expected),
                Err(Error::Premise(why)) => {
                    let skew = dirs.iter().map(|y| skew_symmetry_residual(&space, y)).fold(0.0, f64::max);
                    let rep = ricci_direction_scan(&space, &dirs, cfg.samples, seed, cfg.mode)?;
                    let mut s = from_check(index, name, rep, StepStatus::Open, expected);
                    s.details.insert(0, format!("premise fails: {why}"));
                    s.details.insert(1, format!("ad(Y) is not skew for every invariant metric (residual {skew:.3e})"));
                    if s.status == StepStatus::Mismatch {
                        s.details.push("Ric(Y,Y) < 0 for some invariant metrics, so the sign argument does not settle the verdict".into());
                    }
                    s
                }
                Err(e) => return Err(e),
            }
        }
        "conjugated_cartan_sweep" => {
            let rep = conjugated_cartan_sweep(&space, cfg.samples.min(40), seed, cfg.mode)?;
            let mut s = from_check(index, name, rep, StepStatus::Cited, "orthogonal conjugated Cartan decomposition");
            if s.status == StepStatus::Mismatch {
                s.status = StepStatus::Open;
                s.details.push(
                    "no Cartan decomposition containing the isotropy makes the sampled metrics orthogonal; the cited verdict is not reproduced by this route"
                        .into(),
                );
            }
            s
        }
        "product_forcing" => {
            let rep = product_forcing_certificate(&space, &case.factor, cfg.samples, seed, cfg.mode)?;
            if rep.passed {
                deviations.push(
                    "the proof's cross-Ricci identity is displayed with factor (gamma^2 + tr S^2); the computation gives (lambda^2/2 + tr S^2). Both are positive, so the conclusion stands"
                        .into(),
                );
            }
            from_check(index, name, rep, StepStatus::Match, "cross Ricci forces a product metric")
        }
        "milnor" => {
            let rep = milnor_certificate(&space, cfg.samples, seed)?;
            from_check(index, name, rep, StepStatus::Match, "Milnor signs rule out Einstein")
        }
        "killing_metric" => {
            let rep = killing_metric_check(&case.space)?;
            from_check(index, name, rep, StepStatus::Match, "Ric = -B/2 exactly")
        }
        "einstein_search" => {
            let mut problem = SearchProblem::new(space)?;
            problem.seed = seed;
            problem.starts = cfg.search_starts;
            problem.max_iter = cfg.search_iterations;
            problem.mode = cfg.mode;
            let results = einstein_search(&problem)?;
            let best = &results[0];
            let converged = results.iter().filter(|r| r.status == SearchStatus::Converged).count();
            let observed = format!("best residual {:.3e} ({:?}), c = {:.4}", best.residual, best.status, best.c);
            let mut s = step(index, name, "einstein-search", true, "", observed);
            s.evidence = true;
            s.details.push(format!("{} distinct local minima from {} starts, {converged} converged", results.len(), cfg.search_starts));
            match verdict {
                Some(Verdict::Symmetric) => {
                    s.expected = "converges with c < 0".into();
                    s.status = if best.status == SearchStatus::Converged && best.c < 0.0 {
                        StepStatus::Match
                    } else {
                        StepStatus::Mismatch
                    };
                }
                Some(Verdict::OpenCase) => {
                    s.expected = "no claim (open case)".into();
                    s.status = StepStatus::Open;
                }
                _ => {
                    s.expected = "no converged start".into();
                    s.status = if converged == 0 { StepStatus::Match } else { StepStatus::Mismatch };
                }
            }
            s
        }
        "theta_moment_map" => {
            let data = theta_structure(case, Matrix::identity(case.space.dim()))?;
            let mm = moment_map_residual(&data)?;
            let ok = mm.residual == 0.0 && mm.center_symmetry == 0.0;
            let mut s = step(index, name, "theta-moment-map", ok, "0 (exact)", format!("{}", mm.residual));
            s.details.push("inner product on k: minus the Killing form".into());
            s
        }
        "theta_certificate" => theta_certificate(case, index, cfg, deviations)?,
        other => return Err(Error::Premise(format!("unknown recipe step \"{other}\""))),
    })
}

fn theta_certificate(case: &Case, index: usize, cfg: &VerifyConfig, deviations: &mut Vec<String>) -> Result<StepReport> {
    let name = "theta_certificate";
    match case.record.name.as_str() {
        "Sl2C/U1-theta" => {
            let data = theta_structure(case, Matrix::identity(5))?;
            let t = c_theta_form(&data)?;
            let p = data.uk_space.positions(Part::P);
            let q = data.uk_space.positions(Part::Q);
            let lambda = t[(p[0], p[0])].clone();
            let scalar_on_p = lambda.is_positive()
                && p.iter().all(|&i| p.iter().all(|&j| t[(i, j)] == if i == j { lambda.clone() } else { Rational::zero() }));
            let zero_on_q = q.iter().all(|&i| (0..5).all(|j| t[(i, j)].negligible(0.0)));
            let entry = offdiagonal_entry_check(case, cfg.formula_points.min(50), cfg.seed)?;
            let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed ^ 0x5eed);
            let mut cross_zero = true;
            let fam = MetricFamily::Sl2cU1;
            for _ in 0..20 {
                let (a, b, d, e) = (
                    random_rational(&mut rng, true),
                    random_rational(&mut rng, true),
                    random_rational(&mut rng, false),
                    random_rational(&mut rng, true),
                );
                let c = c_theta_in_frame(&data, &fam.frame(&a, &b, &d, &e)?)?;
                cross_zero &= c[(1, 4)].negligible(0.0);
            }
            let ok = scalar_on_p && zero_on_q && entry.passed && cross_zero;
            let mut s = step(
                index,
                name,
                "sl2c-theta-c-operator",
                ok,
                "C_theta = lambda I on p, 0 on q; entry forces d = 0",
                format!("lambda = {}", format_rational(&lambda)),
            );
            s.details.push(format!("C_theta is a positive multiple of the identity on p: {scalar_on_p}; vanishes on q: {zero_on_q}"));
            s.details.push(format!("C_theta(h^-1 Y1, h^-1 X2) = 0 on 20 random metrics: {cross_zero}"));
            s.details.extend(entry.details);
            s.details.push("with d = 0 the metric is Cartan-orthogonal and C_theta is scalar on p, so the cited non-existence argument applies".into());
            Ok(s)
        }
        "Sl2RxSl2R/D11-theta" => {
            let ids = theta_d11_identities(case, 50, cfg.seed)?;
            let sweep = parameter_sweep(SweepFamily::ThetaD11, &SweepFamily::ThetaD11.default_grid(), cfg.mode)?;
            let ok = ids.r11_matches_computed == ids.points
                && ids.combination_matches_computed == ids.points
                && sweep.holds("computed_not_both_negative")?
                && sweep.holds("displayed_not_both_negative")?;
            let mut s = step(
                index,
                name,
                "theta-d11-sign-certificate",
                ok,
                "r11 and the combination never both negative",
                format!("0 of {} grid nodes with both negative", sweep.nodes),
            );
            s.details.push(format!(
                "exact r^theta agrees with the computed closed forms at {}/{} and {}/{} random points",
                ids.r11_matches_computed, ids.points, ids.combination_matches_computed, ids.points
            ));
            s.details.push(format!("sign tallies: {:?}", sweep.tallies));
            if ids.r11_matches_displayed < ids.points || ids.combination_matches_displayed < ids.points {
                deviations.push(format!(
                    "displayed r11 agrees with the exact value at {}/{} random points and the displayed combination at {}/{}; the computed forms are r11 = (a^4 + (b^2-d^2)^2)e^4/2 + a^2 d^2 (e^2-4b^2)(e^2+4b^2) and r11 + 2r44 + 2(a/d)r24 = (a^2-b^2+d^2)^2 e^4/2 + 16a^4 b^4. The sign conclusion holds for both",
                    ids.r11_matches_displayed, ids.points, ids.combination_matches_displayed, ids.points
                ));
            }
            Ok(s)
        }
        other => Err(Error::Premise(format!("{other} has no θ certificate"))),
    }
}

/// Run the recipe of one catalog row.
pub fn verify_case(name: &str, params: &[i64], cfg: &VerifyConfig) -> Result<CaseVerdictReport> {
    let record = crate::catalog::find(name)?;
    if record.metadata_only {
        return Ok(CaseVerdictReport {
            case: record.name.clone(),
            row: record.name.clone(),
            section: record.section.clone(),
            params: vec![],
            expected_verdict: None,
            cited: false,
            status: StepStatus::Metadata,
            steps: vec![],
            deviations: vec![],
            convention: record.convention.clone(),
            note: record.note.clone(),
        });
    }
    let case = build_case(name, params)?;
    let rule = record.expected_verdict(&case.params)?;
    let mut steps = Vec::new();
    let mut deviations = Vec::new();
    for (index, st) in record.recipe_for(&case.params)?.into_iter().enumerate() {
        let report = run_step(&case, index, &st.step, cfg, &mut deviations)
            .map_err(|e| Error::Recipe { step: index, name: st.step.clone(), source: Box::new(e) })?;
        steps.push(report);
    }
    let cited = rule.is_some_and(|r| r.cited);
    let worst = steps.iter().map(|s| s.status).max().unwrap_or(StepStatus::Match);
    let status = match worst {
        StepStatus::Mismatch => StepStatus::Mismatch,
        _ if rule.is_some_and(|r| r.verdict == Verdict::OpenCase) => StepStatus::Open,
        StepStatus::Open => StepStatus::Open,
        _ if cited || steps.iter().any(|s| s.status == StepStatus::Cited) => StepStatus::Cited,
        _ => StepStatus::Match,
    };
    Ok(CaseVerdictReport {
        case: case.space.name().to_string(),
        row: record.name.clone(),
        section: record.section.clone(),
        params: if record.fixed_params.is_some() { vec![] } else { case.params.clone() },
        expected_verdict: rule.map(|r| r.verdict),
        cited,
        status,
        steps,
        deviations,
        convention: record.convention.clone(),
        note: record.note.clone(),
    })
}

/// Every row in catalog order; infinite families at `family_members` sampled parameters.
pub fn verify_paper(cfg: &VerifyConfig) -> Result<PaperReport> {
    let _ = policy();
    let mut cases = Vec::new();
    for record in rows() {
        if record.is_family() {
            for p in record.sample_params(cfg.pmax).into_iter().take(cfg.family_members) {
                cases.push(verify_case(&record.name, &p, cfg)?);
            }
        } else {
            cases.push(verify_case(&record.name, &[], cfg)?);
        }
    }
    Ok(PaperReport { config: cfg.clone(), catalog_version: crate::catalog::catalog_version(), cases })
}
