//! Tiny predicate language over integer row parameters.
//!
//! ```text
//! cond  := conj ("||" conj)*
//! conj  := atom ("&&" atom)*
//! atom  := term op term
//! term  := integer | name | "|" name "|"
//! op    := "==" | "!=" | "<=" | ">=" | "<" | ">"
//! ```

use std::collections::BTreeMap;

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
enum Term {
    Lit(i64),
    Var(String),
    Abs(String),
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Op {
    Eq,
    Ne,
    Le,
    Ge,
    Lt,
    Gt,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Condition {
    /// Disjunction of conjunctions of atoms.
    clauses: Vec<Vec<(Term, Op, Term)>>,
    source: String,
}

fn parse_term(s: &str) -> Result<Term> {
    let s = s.trim();
    if let Some(inner) = s.strip_prefix('|').and_then(|r| r.strip_suffix('|')) {
        return Ok(Term::Abs(inner.trim().to_string()));
    }
    if let Ok(v) = s.parse::<i64>() {
        return Ok(Term::Lit(v));
    }
    if !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_') {
        return Ok(Term::Var(s.to_string()));
    }
    Err(Error::Parse(format!("bad term \"{s}\" in condition")))
}

fn parse_atom(s: &str) -> Result<(Term, Op, Term)> {
    for (tok, op) in [("==", Op::Eq), ("!=", Op::Ne), ("<=", Op::Le), (">=", Op::Ge), ("<", Op::Lt), (">", Op::Gt)] {
        if let Some((l, r)) = s.split_once(tok) {
            return Ok((parse_term(l)?, op, parse_term(r)?));
        }
    }
    Err(Error::Parse(format!("no comparison in \"{}\"", s.trim())))
}

impl Condition {
    pub fn parse(src: &str) -> Result<Self> {
        let clauses = src
            .split("||")
            .map(|c| c.split("&&").map(parse_atom).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(Condition { clauses, source: src.trim().to_string() })
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    /// Parameter names referenced by the condition.
    pub fn variables(&self) -> Vec<String> {
        let mut v: Vec<String> = self
            .clauses
            .iter()
            .flatten()
            .flat_map(|(l, _, r)| [l, r])
            .filter_map(|t| match t {
                Term::Var(n) | Term::Abs(n) => Some(n.clone()),
                Term::Lit(_) => None,
            })
            .collect();
        v.sort();
        v.dedup();
        v
    }

    pub fn eval(&self, env: &BTreeMap<String, i64>) -> Result<bool> {
        let value = |t: &Term| -> Result<i64> {
            match t {
                Term::Lit(v) => Ok(*v),
                Term::Var(n) => env.get(n).copied().ok_or_else(|| Error::Parse(format!("unknown parameter {n}"))),
                Term::Abs(n) => env
                    .get(n)
                    .map(|v| v.abs())
                    .ok_or_else(|| Error::Parse(format!("unknown parameter {n}"))),
            }
        };
        for clause in &self.clauses {
            let mut all = true;
            for (l, op, r) in clause {
                let (a, b) = (value(l)?, value(r)?);
                let ok = match op {
                    Op::Eq => a == b,
                    Op::Ne => a != b,
                    Op::Le => a <= b,
                    Op::Ge => a >= b,
                    Op::Lt => a < b,
                    Op::Gt => a > b,
                };
                if !ok {
                    all = false;
                    break;
                }
            }
            if all {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

/// Environment binding parameter names to values.
pub fn env(names: &[String], values: &[i64]) -> BTreeMap<String, i64> {
    names.iter().cloned().zip(values.iter().copied()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn evaluates_conjunctions_and_absolute_values() {
        let names = vec!["p".to_string(), "q".to_string()];
        let c = Condition::parse("|p| == |q|").unwrap();
        assert!(c.eval(&env(&names, &[-2, 2])).unwrap());
        assert!(!c.eval(&env(&names, &[1, 2])).unwrap());
        let c = Condition::parse("p==0 && q==1 || p == q").unwrap();
        assert!(c.eval(&env(&names, &[0, 1])).unwrap());
        assert!(c.eval(&env(&names, &[3, 3])).unwrap());
        assert!(!c.eval(&env(&names, &[0, 2])).unwrap());
        assert_eq!(c.variables(), vec!["p".to_string(), "q".to_string()]);
    }

    #[test]
    fn rejects_garbage() {
        assert!(Condition::parse("p ~ q").is_err());
        assert!(Condition::parse("p == q+").is_err());
        let c = Condition::parse("r == 1").unwrap();
        assert!(c.eval(&env(&["p".into()], &[1])).is_err());
    }
}
