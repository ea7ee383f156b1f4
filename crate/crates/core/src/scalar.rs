//! Scalar backends: exact rationals, `f64`, and a forward-mode dual number.

use std::fmt::{self, Debug, Display};
use std::ops::{Add, Div, Mul, Neg, Sub};

use num::bigint::BigInt;
use num::{BigRational, One, Signed, ToPrimitive, Zero};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::matrix::Matrix;

pub type Rational = BigRational;

/// Field operations shared by every backend.
pub trait Scalar:
    Clone
    + Debug
    + PartialEq
    + Send
    + Sync
    + 'static
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
{
    const EXACT: bool;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_i64(v: i64) -> Self;
    fn from_f64(v: f64) -> Self;
    fn to_f64(&self) -> f64;

    fn from_ratio(p: i64, q: i64) -> Self {
        Self::from_i64(p) / Self::from_i64(q)
    }

    /// Magnitude used for pivot selection.
    fn magnitude(&self) -> f64 {
        self.to_f64().abs()
    }

    /// Exact zero test on exact backends, `|x| <= tol` otherwise.
    fn negligible(&self, tol: f64) -> bool;

    fn is_positive(&self) -> bool {
        self.to_f64() > 0.0
    }

    /// Basis of the right null space of `m`, as columns of the result.
    fn null_space(m: &Matrix<Self>, tol: f64) -> Matrix<Self> {
        m.null_space_rref(tol)
    }

    fn to_json(&self) -> Value;
    fn from_json(v: &Value) -> Result<Self>;
}

/// Scalars that admit square roots (needed for orthonormal frames).
pub trait RealScalar: Scalar {
    fn sqrt(&self) -> Self;
}

impl Scalar for f64 {
    const EXACT: bool = false;

    fn zero() -> Self {
        0.0
    }
    fn one() -> Self {
        1.0
    }
    fn from_i64(v: i64) -> Self {
        v as f64
    }
    fn from_f64(v: f64) -> Self {
        v
    }
    fn to_f64(&self) -> f64 {
        *self
    }
    fn negligible(&self, tol: f64) -> bool {
        self.abs() <= tol
    }
    fn null_space(m: &Matrix<Self>, tol: f64) -> Matrix<Self> {
        crate::linalg::svd_null_space(m, tol)
    }
    fn to_json(&self) -> Value {
        serde_json::Number::from_f64(*self)
            .map(Value::Number)
            .unwrap_or(Value::Null)
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::Number(n) => n
                .as_f64()
                .ok_or_else(|| Error::Parse(format!("not a finite number: {n}"))),
            Value::String(s) => Ok(Scalar::to_f64(&parse_rational(s)?)),
            other => Err(Error::Parse(format!("expected a number, got {other}"))),
        }
    }
}

impl RealScalar for f64 {
    fn sqrt(&self) -> Self {
        f64::sqrt(*self)
    }
}

impl Scalar for Rational {
    const EXACT: bool = true;

    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }
    fn from_f64(v: f64) -> Self {
        BigRational::from_float(v).unwrap_or_else(Zero::zero)
    }
    fn from_ratio(p: i64, q: i64) -> Self {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }
    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }
    fn magnitude(&self) -> f64 {
        if Zero::is_zero(self) {
            0.0
        } else {
            // Any nonzero pivot is acceptable; prefer larger ones for smaller denominators.
            ToPrimitive::to_f64(&self.abs()).unwrap_or(f64::MAX).max(f64::MIN_POSITIVE)
        }
    }
    fn negligible(&self, _tol: f64) -> bool {
        Zero::is_zero(self)
    }
    fn is_positive(&self) -> bool {
        Signed::is_positive(self)
    }
    fn to_json(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn from_json(v: &Value) -> Result<Self> {
        match v {
            Value::String(s) => parse_rational(s),
            Value::Number(n) => {
                if let Some(i) = n.as_i64() {
                    Ok(Self::from_i64(i))
                } else {
                    let f = n
                        .as_f64()
                        .ok_or_else(|| Error::Parse(format!("not a finite number: {n}")))?;
                    Ok(<Self as Scalar>::from_f64(f))
                }
            }
            other => Err(Error::Parse(format!("expected a rational, got {other}"))),
        }
    }
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse(format!("malformed rational \"{s}\""));
    let (num, den) = match t.split_once('/') {
        Some((a, b)) => (a.trim(), b.trim()),
        None => (t, "1"),
    };
    let n: BigInt = num.parse().map_err(|_| bad())?;
    let d: BigInt = den.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(BigRational::new(n, d))
}

pub fn format_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// `a/b` as an exact rational.
pub fn rat(p: i64, q: i64) -> Rational {
    Rational::from_ratio(p, q)
}

/// First-order dual number `v + d·ε`, used for exact directional derivatives.
#[derive(Clone, Copy, PartialEq, Default)]
pub struct Dual {
    pub v: f64,
    pub d: f64,
}

impl Dual {
    pub fn new(v: f64, d: f64) -> Self {
        Dual { v, d }
    }
    pub fn constant(v: f64) -> Self {
        Dual { v, d: 0.0 }
    }
}

impl Debug for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}+{}ε", self.v, self.d)
    }
}

impl Display for Dual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        Debug::fmt(self, f)
    }
}

impl Add for Dual {
    type Output = Dual;
    fn add(self, o: Dual) -> Dual {
        Dual::new(self.v + o.v, self.d + o.d)
    }
}

impl Sub for Dual {
    type Output = Dual;
    fn sub(self, o: Dual) -> Dual {
        Dual::new(self.v - o.v, self.d - o.d)
    }
}

impl Mul for Dual {
    type Output = Dual;
    fn mul(self, o: Dual) -> Dual {
        Dual::new(self.v * o.v, self.v * o.d + self.d * o.v)
    }
}

impl Div for Dual {
    type Output = Dual;
    fn div(self, o: Dual) -> Dual {
        Dual::new(self.v / o.v, (self.d * o.v - self.v * o.d) / (o.v * o.v))
    }
}

impl Neg for Dual {
    type Output = Dual;
    fn neg(self) -> Dual {
        Dual::new(-self.v, -self.d)
    }
}

impl Scalar for Dual {
    const EXACT: bool = false;

    fn zero() -> Self {
        Dual::constant(0.0)
    }
    fn one() -> Self {
        Dual::constant(1.0)
    }
    fn from_i64(v: i64) -> Self {
        Dual::constant(v as f64)
    }
    fn from_f64(v: f64) -> Self {
        Dual::constant(v)
    }
    fn to_f64(&self) -> f64 {
        self.v
    }
    /// With `tol == 0` a value counts as zero only if its derivative vanishes too,
    /// so sparsity shortcuts never drop a tangent.
    fn negligible(&self, tol: f64) -> bool {
        self.v.abs() <= tol && (tol > 0.0 || self.d == 0.0)
    }
    fn to_json(&self) -> Value {
        self.v.to_json()
    }
    fn from_json(v: &Value) -> Result<Self> {
        f64::from_json(v).map(Dual::constant)
    }
}

impl RealScalar for Dual {
    fn sqrt(&self) -> Self {
        let s = self.v.sqrt();
        Dual::new(s, self.d / (2.0 * s))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rational_round_trip() {
        let r = parse_rational("-3/6").unwrap();
        assert_eq!(r, rat(-1, 2));
        assert_eq!(format_rational(&r), "-1/2");
        assert_eq!(format_rational(&rat(4, 2)), "2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn dual_derivatives() {
        let x = Dual::new(3.0, 1.0);
        let y = x * x / (x + Dual::one());
        // d/dx x²/(x+1) = (x² + 2x)/(x+1)² at 3 → 15/16
        assert!((y.d - 15.0 / 16.0).abs() < 1e-15);
        assert!((x.sqrt().d - 0.5 / 3f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn json_values() {
        let v = serde_json::json!("7/3");
        assert_eq!(Rational::from_json(&v).unwrap(), rat(7, 3));
        assert!((f64::from_json(&v).unwrap() - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!(Rational::from_json(&serde_json::json!(5)).unwrap(), rat(5, 1));
        assert_eq!(Rational::from_json(&serde_json::json!(0.5)).unwrap(), rat(1, 2));
    }
}
