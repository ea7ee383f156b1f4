use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::geometry::space::{HomogeneousSpace, InvariantMetric, Part};
use crate::lie::json::{algebra_from_json, algebra_to_json, matrix_from_json, matrix_to_json};
use crate::scalar::Scalar;

fn index_list(v: &Value, name: &str) -> Result<Vec<usize>> {
    match v.get(name) {
        None => Ok(vec![]),
        Some(Value::Array(a)) => a
            .iter()
            .map(|x| {
                x.as_u64()
                    .map(|i| i as usize)
                    .ok_or_else(|| Error::Parse(format!("{name} entries must be non-negative integers")))
            })
            .collect(),
        Some(_) => Err(Error::Parse(format!("{name} must be an array"))),
    }
}

pub fn space_to_json<S: Scalar>(space: &HomogeneousSpace<S>) -> Value {
    let mut v = json!({
        "name": space.name(),
        "algebra": algebra_to_json(space.algebra()),
        "isotropy": space.isotropy(),
        "complement": space.complement(),
    });
    if space.has_cartan() {
        let pick = |part| -> Vec<usize> { space.positions(part).iter().map(|&i| space.complement()[i]).collect() };
        v["cartan"] = json!({"q": pick(Part::Q), "p": pick(Part::P)});
    }
    v
}

/// Reads `{name, algebra, isotropy, complement, cartan?}`. A missing complement
/// defaults to every index outside the isotropy.
pub fn space_from_json<S: Scalar>(v: &Value) -> Result<HomogeneousSpace<S>> {
    let algebra = algebra_from_json::<S>(v.get("algebra").ok_or_else(|| Error::Parse("missing field \"algebra\"".into()))?)?;
    let name = v.get("name").and_then(Value::as_str).unwrap_or("unnamed").to_string();
    let isotropy = index_list(v, "isotropy")?;
    let complement = match v.get("complement") {
        Some(_) => index_list(v, "complement")?,
        None => (0..algebra.dim()).filter(|i| !isotropy.contains(i)).collect(),
    };
    let space = HomogeneousSpace::new(name, algebra, isotropy, complement)?;
    match v.get("cartan") {
        Some(c) => space.with_cartan(&index_list(c, "q")?, &index_list(c, "p")?),
        None => Ok(space),
    }
}

pub fn metric_to_json<S: Scalar>(metric: &InvariantMetric<S>) -> Value {
    json!({"gram": matrix_to_json(metric.gram())})
}

/// Accepts `{"gram": [[..]]}` or a bare matrix.
pub fn metric_from_json<S: Scalar>(space: &HomogeneousSpace<S>, v: &Value) -> Result<InvariantMetric<S>> {
    let m = matrix_from_json::<S>(v.get("gram").unwrap_or(v))?;
    InvariantMetric::new(space, m)
}
