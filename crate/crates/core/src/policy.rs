//! The global numeric policy: every tolerance used by the library.

use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const POLICY_ENV: &str = "HEC_NUMERIC_POLICY";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NumericPolicy {
    /// Jacobi, derivation, homomorphism and reductivity residuals.
    pub structural: f64,
    /// Curvature comparisons and Ad(K)-invariance.
    pub curvature: f64,
    /// Singular-value gap ratio for rank decisions.
    pub rank_gap: f64,
    /// Search convergence on the max-norm Einstein residual.
    pub convergence: f64,
}

impl Default for NumericPolicy {
    fn default() -> Self {
        NumericPolicy {
            structural: 1e-12,
            curvature: 1e-10,
            rank_gap: 1e-8,
            convergence: 1e-11,
        }
    }
}

impl NumericPolicy {
    /// Overrides from either a JSON object or a `key=value,key=value` list.
    pub fn with_overrides(self, spec: &str) -> Result<Self> {
        let spec = spec.trim();
        if spec.is_empty() {
            return Ok(self);
        }
        let mut value = serde_json::to_value(self)?;
        let obj = value.as_object_mut().expect("policy serializes to an object");
        let overrides: serde_json::Map<String, serde_json::Value> = if spec.starts_with('{') {
            serde_json::from_str(spec)?
        } else {
            let mut m = serde_json::Map::new();
            for part in spec.split(',').filter(|s| !s.trim().is_empty()) {
                let (k, v) = part
                    .split_once('=')
                    .ok_or_else(|| Error::Parse(format!("policy override \"{part}\" lacks '='")))?;
                let x: f64 = v
                    .trim()
                    .parse()
                    .map_err(|_| Error::Parse(format!("policy value \"{v}\" is not a number")))?;
                m.insert(k.trim().to_string(), serde_json::json!(x));
            }
            m
        };
        for (k, v) in overrides {
            if !obj.contains_key(&k) {
                return Err(Error::Parse(format!("unknown policy key \"{k}\"")));
            }
            obj.insert(k, v);
        }
        let p: NumericPolicy = serde_json::from_value(value)?;
        p.validate()?;
        Ok(p)
    }

    pub fn from_env() -> Result<Self> {
        match std::env::var(POLICY_ENV) {
            Ok(s) => Self::default().with_overrides(&s),
            Err(_) => Ok(Self::default()),
        }
    }

    fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("structural", self.structural),
            ("curvature", self.curvature),
            ("rank_gap", self.rank_gap),
            ("convergence", self.convergence),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::Parse(format!("policy {name} must lie in (0,1), got {v}")));
            }
        }
        Ok(())
    }
}

static POLICY: OnceLock<NumericPolicy> = OnceLock::new();

/// Install the process-wide policy. Only the first call takes effect.
pub fn install(p: NumericPolicy) -> bool {
    POLICY.set(p).is_ok()
}

/// The process-wide policy (defaults unless installed).
pub fn policy() -> NumericPolicy {
    *POLICY.get_or_init(NumericPolicy::default)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides() {
        let p = NumericPolicy::default()
            .with_overrides("curvature=1e-9, rank_gap=1e-7")
            .unwrap();
        assert_eq!(p.curvature, 1e-9);
        assert_eq!(p.rank_gap, 1e-7);
        let q = NumericPolicy::default()
            .with_overrides(r#"{"structural": 1e-13}"#)
            .unwrap();
        assert_eq!(q.structural, 1e-13);
        assert!(NumericPolicy::default().with_overrides("bogus=1").is_err());
        assert!(NumericPolicy::default().with_overrides("curvature=2").is_err());
    }
}
