//! Low-dimensional non-compact homogeneous spaces with their isotropy data,
//! expected verdicts and verification recipes.
//!
//! Row metadata ships as `data/catalog.json`; structure constants come from
//! exact matrix models in [`models`].

pub mod certificates;
pub mod condition;
pub mod family;
pub mod models;
mod rows;
pub mod theta;
pub mod verify;

use std::sync::OnceLock;

use num::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{HomogeneousSpace, ModuleSignature, Part, SignatureBlock};
use crate::scalar::Rational;
use condition::{env, Condition};

pub use certificates::{
    cartan_orthogonality_test, conjugated_cartan_sweep, killing_metric_check, milnor_certificate,
    product_forcing_certificate, ricci_direction_scan, ricci_sign_certificate, skew_symmetry_residual, CartanVerdict, CheckReport,
};
pub use family::{metric_family, offdiagonal_entry_formula, MetricFamily};
pub use verify::{verify_case, verify_paper, CaseVerdictReport, PaperReport, StepStatus, VerifyConfig};

/// Expected verdict of a row.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Verdict {
    #[serde(rename = "NoEinstein_CartanOrthogonal")]
    NoEinsteinCartanOrthogonal,
    #[serde(rename = "NoEinstein_RicciSign")]
    NoEinsteinRicciSign,
    #[serde(rename = "NoEinstein_ExplicitFormula")]
    NoEinsteinExplicitFormula,
    OpenCase,
    Symmetric,
    ProductOnly,
}

impl Verdict {
    pub fn as_str(self) -> &'static str {
        match self {
            Verdict::NoEinsteinCartanOrthogonal => "NoEinstein_CartanOrthogonal",
            Verdict::NoEinsteinRicciSign => "NoEinstein_RicciSign",
            Verdict::NoEinsteinExplicitFormula => "NoEinstein_ExplicitFormula",
            Verdict::OpenCase => "OpenCase",
            Verdict::Symmetric => "Symmetric",
            Verdict::ProductOnly => "ProductOnly",
        }
    }
}

impl std::fmt::Display for Verdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectedBlock {
    pub label: String,
    pub part: Part,
    pub dim: usize,
    #[serde(default)]
    pub trivial: bool,
    /// Parameter condition under which the block is trivial instead.
    #[serde(default)]
    pub trivial_when: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ExpectedEquivalence {
    pub a: String,
    pub b: String,
    #[serde(default)]
    pub when: Option<String>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct VerdictRule {
    #[serde(default)]
    pub when: Option<String>,
    pub verdict: Verdict,
    /// Settled by a cited criterion whose hypotheses are only supported numerically.
    #[serde(default)]
    pub cited: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct RecipeStep {
    pub step: String,
    #[serde(default)]
    pub when: Option<String>,
}

/// One catalog row.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CaseRecord {
    pub name: String,
    #[serde(default)]
    pub aliases: Vec<String>,
    pub dim: usize,
    pub section: String,
    #[serde(default)]
    pub note: Option<String>,
    #[serde(default)]
    pub params: Vec<String>,
    #[serde(default)]
    pub constraint: Option<String>,
    #[serde(default)]
    pub fixed_params: Option<Vec<i64>>,
    #[serde(default)]
    pub convention: Option<String>,
    #[serde(default)]
    pub compact: Option<String>,
    #[serde(default)]
    pub symmetric_dual: Option<String>,
    #[serde(default)]
    pub noncompact: Option<String>,
    #[serde(default)]
    pub isotropy: Option<String>,
    #[serde(default)]
    pub metadata_only: bool,
    #[serde(default)]
    pub symmetric: bool,
    #[serde(default)]
    pub theta: bool,
    #[serde(default)]
    pub product_factor: bool,
    #[serde(default)]
    pub blocks: Vec<ExpectedBlock>,
    #[serde(default)]
    pub equivalences: Vec<ExpectedEquivalence>,
    #[serde(default)]
    pub verdicts: Vec<VerdictRule>,
    #[serde(default)]
    pub recipe: Vec<RecipeStep>,
}

#[derive(Debug, Deserialize)]
struct CatalogFile {
    version: u32,
    rows: Vec<CaseRecord>,
}

static CATALOG: OnceLock<(u32, Vec<CaseRecord>)> = OnceLock::new();

fn load() -> &'static (u32, Vec<CaseRecord>) {
    CATALOG.get_or_init(|| {
        let file: CatalogFile =
            serde_json::from_str(include_str!("../../data/catalog.json")).expect("bundled catalog parses");
        (file.version, file.rows)
    })
}

pub fn catalog_version() -> u32 {
    load().0
}

/// All rows in catalog order.
pub fn rows() -> &'static [CaseRecord] {
    &load().1
}

/// Look up a row by name or alias, suggesting close names on a miss.
pub fn find(name: &str) -> Result<&'static CaseRecord> {
    if let Some(r) = rows().iter().find(|r| r.name == name || r.aliases.iter().any(|a| a == name)) {
        return Ok(r);
    }
    let lower = name.to_lowercase();
    if let Some(r) = rows().iter().find(|r| r.name.to_lowercase() == lower) {
        return Ok(r);
    }
    let mut scored: Vec<(f64, &str)> = rows()
        .iter()
        .flat_map(|r| std::iter::once(r.name.as_str()).chain(r.aliases.iter().map(|s| s.as_str())))
        .map(|n| (strsim::jaro_winkler(&lower, &n.to_lowercase()), n))
        .filter(|(s, _)| *s > 0.7)
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    Err(Error::UnknownCase {
        name: name.to_string(),
        suggestions: scored.iter().take(3).map(|(_, n)| n.to_string()).collect(),
    })
}

fn gcd_all(v: &[i64]) -> i64 {
    v.iter().fold(0i64, |g, x| g.gcd(x))
}

impl CaseRecord {
    pub fn is_family(&self) -> bool {
        !self.params.is_empty() && self.fixed_params.is_none()
    }

    /// Normalize and validate parameters against the row's constraint.
    pub fn resolve_params(&self, params: &[i64]) -> Result<Vec<i64>> {
        if let Some(fixed) = &self.fixed_params {
            if params.is_empty() || params == fixed.as_slice() {
                return Ok(fixed.clone());
            }
            return Err(Error::ParamConstraint(format!("{} is only defined for parameters {:?}", self.name, fixed)));
        }
        if params.len() != self.params.len() {
            return Err(Error::ParamConstraint(format!(
                "{} takes {} parameters ({}), got {}",
                self.name,
                self.params.len(),
                self.params.join(", "),
                params.len()
            )));
        }
        let fail = |msg: &str| Err(Error::ParamConstraint(format!("{}: {msg}, got {params:?}", self.name)));
        match self.constraint.as_deref() {
            None => {}
            Some("a") => {
                if !(0 <= params[0] && params[0] <= params[1] && gcd_all(params) == 1) {
                    return fail("need 0 <= p <= q and gcd(p, q) = 1");
                }
            }
            Some("b") => {
                if params.contains(&0) || params[0] > params[1] || gcd_all(params) != 1 {
                    return fail("need nonzero p <= q and gcd(p, q) = 1");
                }
            }
            Some("d") => {
                if params.contains(&0) || params.windows(2).any(|w| w[0] > w[1]) || gcd_all(params) != 1 {
                    return fail("need nonzero a1 <= a2 <= a3 with gcd 1");
                }
            }
            Some(other) => return Err(Error::Premise(format!("unknown constraint kind {other}"))),
        }
        Ok(params.to_vec())
    }

    /// Evaluate an optional row condition; `None` holds everywhere.
    pub fn holds(&self, when: &Option<String>, params: &[i64]) -> Result<bool> {
        match when {
            None => Ok(true),
            Some(src) => Condition::parse(src)?.eval(&env(&self.params, params)),
        }
    }

    pub fn expected_verdict(&self, params: &[i64]) -> Result<Option<&VerdictRule>> {
        for rule in &self.verdicts {
            if self.holds(&rule.when, params)? {
                return Ok(Some(rule));
            }
        }
        Ok(None)
    }

    /// Recipe steps active for these parameters.
    pub fn recipe_for(&self, params: &[i64]) -> Result<Vec<&RecipeStep>> {
        let mut out = Vec::new();
        for s in &self.recipe {
            if self.holds(&s.when, params)? {
                out.push(s);
            }
        }
        Ok(out)
    }

    /// Expected module signature for these parameters.
    pub fn expected_signature(&self, params: &[i64]) -> Result<ModuleSignature> {
        let mut blocks = Vec::new();
        for b in &self.blocks {
            let trivial = b.trivial || self.holds(&b.trivial_when, params)? && b.trivial_when.is_some();
            blocks.push(SignatureBlock { part: b.part, dim: b.dim, trivial });
        }
        let index = |l: &str| {
            self.blocks
                .iter()
                .position(|b| b.label == l)
                .ok_or_else(|| Error::Premise(format!("{}: equivalence names unknown block {l}", self.name)))
        };
        let mut pairs = Vec::new();
        for e in &self.equivalences {
            if self.holds(&e.when, params)? {
                pairs.push((index(&e.a)?, index(&e.b)?));
            }
        }
        Ok(ModuleSignature::new(&blocks, &pairs))
    }

    /// Coprime parameter tuples admitted by the constraint with entries bounded by `pmax`,
    /// in a fixed order (small magnitudes first).
    pub fn sample_params(&self, pmax: i64) -> Vec<Vec<i64>> {
        if let Some(fixed) = &self.fixed_params {
            return vec![fixed.clone()];
        }
        if self.params.is_empty() {
            return vec![vec![]];
        }
        let k = self.params.len();
        let mut out = Vec::new();
        let mut cur = vec![-pmax; k];
        loop {
            if self.resolve_params(&cur).is_ok() {
                out.push(cur.clone());
            }
            let mut i = k;
            loop {
                if i == 0 {
                    out.sort_by_key(|v| (v.iter().map(|x| x.abs()).max().unwrap_or(0), v.iter().map(|x| x.abs()).sum::<i64>(), v.clone()));
                    return out;
                }
                i -= 1;
                if cur[i] < pmax {
                    cur[i] += 1;
                    for c in cur.iter_mut().skip(i + 1) {
                        *c = -pmax;
                    }
                    break;
                }
            }
        }
    }
}

/// A constructed row.
pub struct Case {
    pub record: &'static CaseRecord,
    pub params: Vec<i64>,
    pub space: HomogeneousSpace<Rational>,
    /// Matrix model of each algebra basis element.
    pub matrices: Vec<crate::matrix::Matrix<Rational>>,
    /// Complement positions of the separate sl₂(ℝ) factor of product rows.
    pub factor: Vec<usize>,
}

/// Build the homogeneous space of a catalog row with its Cartan split.
pub fn build_case(name: &str, params: &[i64]) -> Result<Case> {
    let record = find(name)?;
    if record.metadata_only {
        return Err(Error::Premise(format!(
            "{} is isotropy irreducible and has no non-compact counterpart; it is kept as metadata only",
            record.name
        )));
    }
    let params = record.resolve_params(params)?;
    let label = if params.is_empty() || record.fixed_params.is_some() {
        record.name.clone()
    } else {
        let p: Vec<String> = params.iter().map(|v| v.to_string()).collect();
        format!("{}[{}]", record.name, p.join(","))
    };
    let built = rows::model(&record.name, &params)?.build(&label)?;
    Ok(Case { record, params, space: built.space, matrices: built.matrices, factor: built.factor })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catalog_loads_and_names_are_unique() {
        let mut names: Vec<&str> = rows().iter().map(|r| r.name.as_str()).collect();
        let n = names.len();
        names.sort();
        names.dedup();
        assert_eq!(names.len(), n);
        assert_eq!(catalog_version(), 1);
    }

    #[test]
    fn unknown_name_suggests() {
        match find("Sl2C/U2") {
            Err(Error::UnknownCase { suggestions, .. }) => assert!(suggestions.contains(&"Sl2C/U1".to_string())),
            other => panic!("unexpected {other:?}", other = other.map(|r| &r.name)),
        }
    }

    #[test]
    fn alias_resolves() {
        assert_eq!(find("Sl2CxSl2R-case-516").unwrap().name, "Sl2RxSl2R/D11-theta");
    }

    #[test]
    fn constraints_are_enforced() {
        assert!(build_case("SU21/Dpq", &[2, 4]).is_err());
        assert!(build_case("SU21/Dpq", &[2, 1]).is_err());
        assert!(build_case("Sl2RxSl2R/Dpq", &[0, 1]).is_err());
        assert!(build_case("Sl2R3/Da1a2a3U1", &[3, 2, 1]).is_err());
        assert!(build_case("G2/SU3", &[]).is_err());
        assert!(build_case("SU21/Dpq", &[0, 1]).is_ok());
    }

    #[test]
    fn families_have_enough_samples() {
        for r in rows().iter().filter(|r| r.is_family()) {
            assert!(r.sample_params(7).len() >= 10, "{}", r.name);
        }
    }
}
