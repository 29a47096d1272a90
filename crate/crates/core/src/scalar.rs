//! Scalars: exact rationals or doubles, never mixed implicitly.

use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;
use thiserror::Error;

/// Whether a verdict or value was obtained by exact arithmetic or by sampling
/// in floating point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Sampled,
}

impl Mode {
    /// `Exact` only if both are exact.
    pub fn and(self, other: Mode) -> Mode {
        if self == Mode::Exact && other == Mode::Exact {
            Mode::Exact
        } else {
            Mode::Sampled
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Exact => "exact",
            Mode::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    Pole,
    #[error("non-finite result")]
    NonFinite,
    #[error("transcendental function has no exact value")]
    Transcendental,
    #[error("float constant in exact evaluation")]
    ModeMismatch,
    #[error("variable x{index} out of range for a point of dimension {dim}")]
    MissingVariable { index: usize, dim: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub enum Scalar {
    Exact(BigRational),
    Float(f64),
}

impl Scalar {
    pub fn int(n: i64) -> Self {
        Scalar::Exact(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn ratio(n: i64, d: i64) -> Self {
        Scalar::Exact(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }

    pub fn zero() -> Self {
        Scalar::Exact(BigRational::zero())
    }

    pub fn one() -> Self {
        Scalar::Exact(BigRational::one())
    }

    pub fn mode(&self) -> Mode {
        match self {
            Scalar::Exact(_) => Mode::Exact,
            Scalar::Float(_) => Mode::Sampled,
        }
    }

    pub fn is_zero(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_zero(),
            Scalar::Float(x) => *x == 0.0,
        }
    }

    pub fn is_one(&self) -> bool {
        match self {
            Scalar::Exact(r) => r.is_one(),
            Scalar::Float(x) => *x == 1.0,
        }
    }

    pub fn as_exact(&self) -> Option<&BigRational> {
        match self {
            Scalar::Exact(r) => Some(r),
            Scalar::Float(_) => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Scalar::Exact(r) => rational_to_f64(r),
            Scalar::Float(x) => *x,
        }
    }

    /// Explicit conversion to float mode.
    pub fn to_float(&self) -> Scalar {
        Scalar::Float(self.to_f64())
    }

    pub fn neg(&self) -> Scalar {
        match self {
            Scalar::Exact(r) => Scalar::Exact(-r),
            Scalar::Float(x) => Scalar::Float(-x),
        }
    }

    pub fn add(&self, other: &Scalar) -> Result<Scalar, EvalError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a + b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a + b)),
            _ => Err(EvalError::ModeMismatch),
        }
    }

    pub fn sub(&self, other: &Scalar) -> Result<Scalar, EvalError> {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &Scalar) -> Result<Scalar, EvalError> {
        match (self, other) {
            (Scalar::Exact(a), Scalar::Exact(b)) => Ok(Scalar::Exact(a * b)),
            (Scalar::Float(a), Scalar::Float(b)) => Ok(Scalar::Float(a * b)),
            _ => Err(EvalError::ModeMismatch),
        }
    }
}

impl fmt::Display for Scalar {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scalar::Exact(r) => write!(f, "{}", r),
            Scalar::Float(x) => write!(f, "{:?}", x),
        }
    }
}

impl Serialize for Scalar {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            Scalar::Exact(r) => serializer.serialize_str(&r.to_string()),
            Scalar::Float(x) => serializer.serialize_f64(*x),
        }
    }
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn ratio(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Evaluation domain for expressions: exact rationals or doubles.
pub trait Numeric: Clone + fmt::Debug {
    fn from_scalar(s: &Scalar) -> Result<Self, EvalError>;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Result<Self, EvalError>;
    fn powi(&self, e: i32) -> Result<Self, EvalError>;
    fn sin(&self) -> Result<Self, EvalError>;
    fn cos(&self) -> Result<Self, EvalError>;
    fn exp(&self) -> Result<Self, EvalError>;
    fn into_scalar(self) -> Scalar;
}

impl Numeric for BigRational {
    fn from_scalar(s: &Scalar) -> Result<Self, EvalError> {
        match s {
            Scalar::Exact(r) => Ok(r.clone()),
            Scalar::Float(_) => Err(EvalError::ModeMismatch),
        }
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self, EvalError> {
        if o.is_zero() {
            Err(EvalError::Pole)
        } else {
            Ok(self / o)
        }
    }
    fn powi(&self, e: i32) -> Result<Self, EvalError> {
        if e < 0 && self.is_zero() {
            return Err(EvalError::Pole);
        }
        Ok(num_traits::pow::Pow::pow(self, e))
    }
    fn sin(&self) -> Result<Self, EvalError> {
        Err(EvalError::Transcendental)
    }
    fn cos(&self) -> Result<Self, EvalError> {
        Err(EvalError::Transcendental)
    }
    fn exp(&self) -> Result<Self, EvalError> {
        Err(EvalError::Transcendental)
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Exact(self)
    }
}

fn finite(x: f64) -> Result<f64, EvalError> {
    if x.is_finite() {
        Ok(x)
    } else {
        Err(EvalError::NonFinite)
    }
}

impl Numeric for f64 {
    fn from_scalar(s: &Scalar) -> Result<Self, EvalError> {
        Ok(s.to_f64())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Result<Self, EvalError> {
        if *o == 0.0 {
            Err(EvalError::Pole)
        } else {
            finite(self / o)
        }
    }
    fn powi(&self, e: i32) -> Result<Self, EvalError> {
        if e < 0 && *self == 0.0 {
            return Err(EvalError::Pole);
        }
        finite(f64::powi(*self, e))
    }
    fn sin(&self) -> Result<Self, EvalError> {
        finite(f64::sin(*self))
    }
    fn cos(&self) -> Result<Self, EvalError> {
        finite(f64::cos(*self))
    }
    fn exp(&self) -> Result<Self, EvalError> {
        finite(f64::exp(*self))
    }
    fn into_scalar(self) -> Scalar {
        Scalar::Float(self)
    }
}

/// Serialize rationals as decimal strings such as `"-3/4"`.
pub fn serialize_rationals<S: serde::Serializer>(
    v: &[BigRational],
    s: S,
) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

/// Print a rational so that it re-parses through the expression grammar.
pub(crate) fn fmt_rational(r: &BigRational) -> String {
    if r.is_integer() && !r.is_negative() {
        r.numer().to_string()
    } else {
        format!("({})", r)
    }
}
