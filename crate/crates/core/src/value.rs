//! Dual-mode probability values: exact rationals for decision procedures and
//! paper counterexamples, floats with a global absolute tolerance for
//! quantum-derived behaviors.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Default absolute tolerance for float-mode comparisons.
pub const DEFAULT_TOL: f64 = 1e-9;

/// A probability (or general scalar) in one of the two numeric modes.
#[derive(Clone, Debug, PartialEq)]
pub enum Value {
    Exact(BigRational),
    Float(f64),
}

/// Numeric mode of a behavior or model. Exact mode compares with strict
/// equality; float mode compares within an absolute tolerance.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum ValueMode {
    Exact,
    Float { tol: f64 },
}

impl ValueMode {
    pub fn float_default() -> Self {
        ValueMode::Float { tol: DEFAULT_TOL }
    }

    pub fn is_exact(&self) -> bool {
        matches!(self, ValueMode::Exact)
    }

    pub fn zero(&self) -> Value {
        match self {
            ValueMode::Exact => Value::Exact(BigRational::zero()),
            ValueMode::Float { .. } => Value::Float(0.0),
        }
    }

    pub fn one(&self) -> Value {
        match self {
            ValueMode::Exact => Value::Exact(BigRational::one()),
            ValueMode::Float { .. } => Value::Float(1.0),
        }
    }

    /// Mode-aware equality.
    pub fn eq(&self, a: &Value, b: &Value) -> bool {
        match self {
            ValueMode::Exact => match (a, b) {
                (Value::Exact(x), Value::Exact(y)) => x == y,
                _ => false,
            },
            ValueMode::Float { tol } => (a.to_f64() - b.to_f64()).abs() <= *tol,
        }
    }

    /// Mode-aware zero test.
    pub fn is_zero(&self, v: &Value) -> bool {
        self.eq(v, &self.zero())
    }

    /// Mode-aware one test.
    pub fn is_one(&self, v: &Value) -> bool {
        self.eq(v, &self.one())
    }

    /// Strictly positive, i.e. not within tolerance of zero and nonnegative.
    pub fn is_positive(&self, v: &Value) -> bool {
        match self {
            ValueMode::Exact => match v {
                Value::Exact(x) => x.is_positive(),
                Value::Float(f) => *f > 0.0,
            },
            ValueMode::Float { tol } => v.to_f64() > *tol,
        }
    }

    /// Nonnegative up to tolerance.
    pub fn is_nonnegative(&self, v: &Value) -> bool {
        match self {
            ValueMode::Exact => match v {
                Value::Exact(x) => !x.is_negative(),
                Value::Float(f) => *f >= 0.0,
            },
            ValueMode::Float { tol } => v.to_f64() >= -*tol,
        }
    }
}

impl Value {
    pub fn exact_int(n: i64) -> Value {
        Value::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn exact(num: i64, den: i64) -> Value {
        Value::Exact(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Value::Exact(r) => r.to_f64().unwrap_or(f64::NAN),
            Value::Float(f) => *f,
        }
    }

    pub fn as_rational(&self) -> Option<&BigRational> {
        match self {
            Value::Exact(r) => Some(r),
            Value::Float(_) => None,
        }
    }

    pub fn into_rational(self) -> Result<BigRational> {
        match self {
            Value::Exact(r) => Ok(r),
            Value::Float(f) => Err(Error::ExactnessRequired(format!(
                "float value {f} where an exact rational is required"
            ))),
        }
    }

    pub fn abs(&self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(r.abs()),
            Value::Float(f) => Value::Float(f.abs()),
        }
    }
}

fn promote(a: &Value, b: &Value) -> (f64, f64) {
    (a.to_f64(), b.to_f64())
}

macro_rules! value_binop {
    ($trait:ident, $method:ident, $op:tt) => {
        impl $trait for Value {
            type Output = Value;
            fn $method(self, rhs: Value) -> Value {
                match (self, rhs) {
                    (Value::Exact(x), Value::Exact(y)) => Value::Exact(x $op y),
                    (a, b) => {
                        let (x, y) = promote(&a, &b);
                        Value::Float(x $op y)
                    }
                }
            }
        }
        impl $trait for &Value {
            type Output = Value;
            fn $method(self, rhs: &Value) -> Value {
                match (self, rhs) {
                    (Value::Exact(x), Value::Exact(y)) => Value::Exact(x $op y),
                    (a, b) => {
                        let (x, y) = promote(a, b);
                        Value::Float(x $op y)
                    }
                }
            }
        }
    };
}

value_binop!(Add, add, +);
value_binop!(Sub, sub, -);
value_binop!(Mul, mul, *);
value_binop!(Div, div, /);

impl Neg for Value {
    type Output = Value;
    fn neg(self) -> Value {
        match self {
            Value::Exact(r) => Value::Exact(-r),
            Value::Float(f) => Value::Float(-f),
        }
    }
}

impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Exact(r) => write!(f, "{}", format_rational(r)),
            Value::Float(x) => write!(f, "{x}"),
        }
    }
}

/// Sum of a sequence of values in the given mode (empty sum is the mode's zero).
pub fn sum_values<'a, I: IntoIterator<Item = &'a Value>>(mode: &ValueMode, iter: I) -> Value {
    iter.into_iter().fold(mode.zero(), |acc, v| &acc + v)
}

/// Serialize a rational in the wire format `"num/den"`.
pub fn format_rational(r: &BigRational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

/// Parse a rational from `"num/den"` or a plain integer string.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n = BigInt::from_str(num)
        .map_err(|e| Error::Validation(format!("bad rational numerator {num:?}: {e}")))?;
    let d = BigInt::from_str(den)
        .map_err(|e| Error::Validation(format!("bad rational denominator {den:?}: {e}")))?;
    if d.is_zero() {
        return Err(Error::Validation(format!("zero denominator in {s:?}")));
    }
    Ok(BigRational::new(n, d))
}

/// Round a float to the nearest rational with denominator 10^digits.
pub fn rationalize_f64(x: f64, digits: u32) -> Result<BigRational> {
    if !x.is_finite() {
        return Err(Error::Validation(format!("cannot rationalize {x}")));
    }
    let den = BigInt::from(10u32).pow(digits);
    let scaled = x * 10f64.powi(digits as i32);
    let num = BigInt::from(scaled.round() as i128);
    Ok(BigRational::new(num, den))
}
