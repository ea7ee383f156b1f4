//! JSON interchange for Lie algebras and matrices.

use serde_json::{json, Map, Value};

use crate::error::{Error, Result};
use crate::lie::algebra::LieAlgebra;
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Parse JSON text, reporting line and column on failure.
pub fn parse_json(text: &str) -> Result<Value> {
    Ok(serde_json::from_str(text)?)
}

pub fn algebra_to_json<S: Scalar>(g: &LieAlgebra<S>) -> Value {
    let n = g.dim();
    let mut brackets = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let mut coeffs = Map::new();
            for k in 0..n {
                let c = g.c(i, j, k);
                if !c.negligible(0.0) {
                    coeffs.insert(k.to_string(), c.to_json());
                }
            }
            if !coeffs.is_empty() {
                brackets.push(json!({"i": i, "j": j, "coeffs": coeffs}));
            }
        }
    }
    json!({"dim": n, "basis": g.labels(), "brackets": brackets})
}

fn field<'a>(v: &'a Value, name: &str) -> Result<&'a Value> {
    v.get(name)
        .ok_or_else(|| Error::Parse(format!("missing field \"{name}\"")))
}

fn as_index(v: &Value, what: &str) -> Result<usize> {
    v.as_u64()
        .map(|x| x as usize)
        .ok_or_else(|| Error::Parse(format!("{what} must be a non-negative integer, got {v}")))
}

pub fn algebra_from_json<S: Scalar>(v: &Value) -> Result<LieAlgebra<S>> {
    let dim = as_index(field(v, "dim")?, "dim")?;
    if dim == 0 {
        return Err(Error::Parse("dim must be positive".into()));
    }
    let labels: Vec<String> = match v.get("basis") {
        Some(Value::Array(a)) => a
            .iter()
            .map(|x| {
                x.as_str()
                    .map(str::to_string)
                    .ok_or_else(|| Error::Parse("basis labels must be strings".into()))
            })
            .collect::<Result<_>>()?,
        Some(_) => return Err(Error::Parse("basis must be an array".into())),
        None => (1..=dim).map(|i| format!("e{i}")).collect(),
    };
    if labels.len() != dim {
        return Err(Error::DimensionMismatch { expected: dim, found: labels.len() });
    }
    let mut entries = Vec::new();
    if let Some(b) = v.get("brackets") {
        let arr = b
            .as_array()
            .ok_or_else(|| Error::Parse("brackets must be an array".into()))?;
        for e in arr {
            let i = as_index(field(e, "i")?, "i")?;
            let j = as_index(field(e, "j")?, "j")?;
            let coeffs = field(e, "coeffs")?
                .as_object()
                .ok_or_else(|| Error::Parse("coeffs must be an object".into()))?;
            let mut cs = Vec::new();
            for (k, val) in coeffs {
                let k: usize = k
                    .parse()
                    .map_err(|_| Error::Parse(format!("coefficient key \"{k}\" is not an index")))?;
                cs.push((k, S::from_json(val)?));
            }
            entries.push((i, j, cs));
        }
    }
    LieAlgebra::from_brackets(labels, &entries)
}

pub fn matrix_to_json<S: Scalar>(m: &Matrix<S>) -> Value {
    Value::Array(
        (0..m.rows())
            .map(|i| Value::Array(m.row(i).iter().map(|x| x.to_json()).collect()))
            .collect(),
    )
}

pub fn matrix_from_json<S: Scalar>(v: &Value) -> Result<Matrix<S>> {
    let rows = v
        .as_array()
        .ok_or_else(|| Error::Parse("matrix must be an array of rows".into()))?;
    let parsed: Vec<Vec<S>> = rows
        .iter()
        .map(|r| {
            r.as_array()
                .ok_or_else(|| Error::Parse("matrix row must be an array".into()))?
                .iter()
                .map(S::from_json)
                .collect()
        })
        .collect::<Result<_>>()?;
    let c = parsed.first().map_or(0, |r| r.len());
    if parsed.iter().any(|r| r.len() != c) {
        return Err(Error::Parse("matrix rows have different lengths".into()));
    }
    Ok(Matrix::from_rows(&parsed))
}

pub fn vector_from_json<S: Scalar>(v: &Value) -> Result<Vec<S>> {
    v.as_array()
        .ok_or_else(|| Error::Parse("vector must be an array".into()))?
        .iter()
        .map(S::from_json)
        .collect()
}

pub fn vector_to_json<S: Scalar>(v: &[S]) -> Value {
    Value::Array(v.iter().map(|x| x.to_json()).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{rat, Rational};

    #[test]
    fn round_trip_rational_and_float() {
        let h = LieAlgebra::<Rational>::heisenberg();
        let v = algebra_to_json(&h);
        assert_eq!(v["brackets"][0]["coeffs"]["2"], json!("1"));
        let back: LieAlgebra<Rational> = algebra_from_json(&v).unwrap();
        assert_eq!(back, h);
        let f: LieAlgebra<f64> = algebra_from_json(&v).unwrap();
        assert_eq!(f, h.to_f64());
    }

    #[test]
    fn omitted_pairs_are_zero_and_reverse_order_allowed() {
        let v = json!({"dim": 3, "basis": ["a","b","c"],
            "brackets": [{"i": 1, "j": 0, "coeffs": {"2": "-1/2"}}]});
        let g: LieAlgebra<Rational> = algebra_from_json(&v).unwrap();
        assert_eq!(*g.c(0, 1, 2), rat(1, 2));
        assert_eq!(*g.c(0, 2, 1), rat(0, 1));
    }

    #[test]
    fn malformed_json_reports_position() {
        match parse_json("{\n  \"dim\": 3,\n  oops\n}") {
            Err(Error::Json { line, column, .. }) => {
                assert_eq!(line, 3);
                assert!(column > 0);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn inconsistent_duplicate_rejected() {
        let v = json!({"dim": 2, "brackets": [
            {"i": 0, "j": 1, "coeffs": {"1": 1}},
            {"i": 1, "j": 0, "coeffs": {"1": 1}}]});
        assert!(algebra_from_json::<Rational>(&v).is_err());
    }
}
