//! Symbolic scalar expressions over variables `x0, x1, …`.

use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::poly::Poly;
use crate::scalar::{fmt_rational, EvalError, Numeric, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(Scalar),
    Var(usize),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, i32),
    Sin(Box<Expr>),
    Cos(Box<Expr>),
    Exp(Box<Expr>),
}

impl Expr {
    pub fn zero() -> Expr {
        Expr::Const(Scalar::zero())
    }

    pub fn one() -> Expr {
        Expr::Const(Scalar::one())
    }

    pub fn int(n: i64) -> Expr {
        Expr::Const(Scalar::int(n))
    }

    pub fn rational(r: BigRational) -> Expr {
        Expr::Const(Scalar::Exact(r))
    }

    pub fn float(x: f64) -> Expr {
        Expr::Const(Scalar::Float(x))
    }

    pub fn var(i: usize) -> Expr {
        Expr::Var(i)
    }

    fn as_const(&self) -> Option<&Scalar> {
        match self {
            Expr::Const(s) => Some(s),
            _ => None,
        }
    }

    pub fn is_zero_const(&self) -> bool {
        self.as_const().is_some_and(Scalar::is_zero)
    }

    fn is_one_const(&self) -> bool {
        self.as_const().is_some_and(Scalar::is_one)
    }

    // Folding constructors. They only apply identities that hold exactly
    // (0 + e, 1 * e, exact constant folding); no general simplification.

    pub fn add(a: Expr, b: Expr) -> Expr {
        if a.is_zero_const() {
            return b;
        }
        if b.is_zero_const() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if let Ok(s) = x.add(y) {
                return Expr::Const(s);
            }
        }
        Expr::Add(Box::new(a), Box::new(b))
    }

    pub fn sub(a: Expr, b: Expr) -> Expr {
        if b.is_zero_const() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if let Ok(s) = x.sub(y) {
                return Expr::Const(s);
            }
        }
        Expr::Sub(Box::new(a), Box::new(b))
    }

    pub fn mul(a: Expr, b: Expr) -> Expr {
        if a.is_zero_const() || b.is_zero_const() {
            return Expr::zero();
        }
        if a.is_one_const() {
            return b;
        }
        if b.is_one_const() {
            return a;
        }
        if let (Some(x), Some(y)) = (a.as_const(), b.as_const()) {
            if let Ok(s) = x.mul(y) {
                return Expr::Const(s);
            }
        }
        Expr::Mul(Box::new(a), Box::new(b))
    }

    pub fn div(a: Expr, b: Expr) -> Expr {
        if b.is_one_const() {
            return a;
        }
        if let (Some(Scalar::Exact(x)), Some(Scalar::Exact(y))) = (a.as_const(), b.as_const()) {
            if !y.is_zero() {
                return Expr::rational(x / y);
            }
        }
        Expr::Div(Box::new(a), Box::new(b))
    }

    pub fn pow(a: Expr, e: i32) -> Expr {
        match e {
            0 => Expr::one(),
            1 => a,
            _ => Expr::Pow(Box::new(a), e),
        }
    }

    pub fn neg(a: Expr) -> Expr {
        match a {
            Expr::Const(s) => Expr::Const(s.neg()),
            other => Expr::mul(Expr::int(-1), other),
        }
    }

    pub fn sin(a: Expr) -> Expr {
        Expr::Sin(Box::new(a))
    }

    pub fn cos(a: Expr) -> Expr {
        Expr::Cos(Box::new(a))
    }

    pub fn exp(a: Expr) -> Expr {
        Expr::Exp(Box::new(a))
    }

    /// One past the largest variable index, 0 for constants.
    pub fn var_bound(&self) -> usize {
        match self {
            Expr::Const(_) => 0,
            Expr::Var(i) => i + 1,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.var_bound().max(b.var_bound())
            }
            Expr::Pow(a, _) | Expr::Sin(a) | Expr::Cos(a) | Expr::Exp(a) => a.var_bound(),
        }
    }

    /// True when every constant is exact and no transcendental node occurs.
    pub fn is_rational_function(&self) -> bool {
        match self {
            Expr::Const(s) => s.as_exact().is_some(),
            Expr::Var(_) => true,
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.is_rational_function() && b.is_rational_function()
            }
            Expr::Pow(a, _) => a.is_rational_function(),
            Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => false,
        }
    }

    pub fn eval<T: Numeric>(&self, point: &[T]) -> Result<T, EvalError> {
        Ok(match self {
            Expr::Const(s) => T::from_scalar(s)?,
            Expr::Var(i) => point.get(*i).cloned().ok_or(EvalError::MissingVariable {
                index: *i,
                dim: point.len(),
            })?,
            Expr::Add(a, b) => a.eval(point)?.add(&b.eval(point)?),
            Expr::Sub(a, b) => a.eval(point)?.sub(&b.eval(point)?),
            Expr::Mul(a, b) => a.eval(point)?.mul(&b.eval(point)?),
            Expr::Div(a, b) => a.eval(point)?.div(&b.eval(point)?)?,
            Expr::Pow(a, e) => a.eval(point)?.powi(*e)?,
            Expr::Sin(a) => a.eval(point)?.sin()?,
            Expr::Cos(a) => a.eval(point)?.cos()?,
            Expr::Exp(a) => a.eval(point)?.exp()?,
        })
    }

    /// Exact evaluation when possible, otherwise float.
    pub fn eval_scalar(&self, point: &[BigRational]) -> Result<Scalar, EvalError> {
        if self.is_rational_function() {
            self.eval(point).map(Scalar::Exact)
        } else {
            let p: Vec<f64> = point.iter().map(crate::scalar::rational_to_f64).collect();
            self.eval(&p).map(Scalar::Float)
        }
    }

    /// Canonical polynomial, if the expression lies in the polynomial
    /// fragment. Division by a nonzero exact constant is accepted.
    pub fn to_poly(&self) -> Option<Poly> {
        Some(match self {
            Expr::Const(Scalar::Exact(r)) => Poly::constant(r.clone()),
            Expr::Const(Scalar::Float(_)) => return None,
            Expr::Var(i) => Poly::var(*i),
            Expr::Add(a, b) => a.to_poly()?.add(&b.to_poly()?),
            Expr::Sub(a, b) => a.to_poly()?.sub(&b.to_poly()?),
            Expr::Mul(a, b) => a.to_poly()?.mul(&b.to_poly()?),
            Expr::Div(a, b) => {
                let d = b.to_poly()?.as_constant()?;
                if d.is_zero() {
                    return None;
                }
                a.to_poly()?.scale(&(BigRational::one() / d))
            }
            Expr::Pow(a, e) => {
                if *e < 0 {
                    return None;
                }
                a.to_poly()?.pow(*e as u32)
            }
            Expr::Sin(_) | Expr::Cos(_) | Expr::Exp(_) => return None,
        })
    }

    pub fn is_polynomial(&self) -> bool {
        self.to_poly().is_some()
    }

    /// Polynomials are replaced by their canonical form; anything else is
    /// returned unchanged.
    pub fn tidy(self) -> Expr {
        match self.to_poly() {
            Some(p) => p.to_expr(),
            None => self,
        }
    }

    /// Partial derivative with respect to `x_var`.
    pub fn differentiate(&self, var: usize) -> Expr {
        if let Some(p) = self.to_poly() {
            return p.derivative(var).to_expr();
        }
        self.diff_raw(var).tidy()
    }

    fn diff_raw(&self, var: usize) -> Expr {
        match self {
            Expr::Const(_) => Expr::zero(),
            Expr::Var(i) => {
                if *i == var {
                    Expr::one()
                } else {
                    Expr::zero()
                }
            }
            Expr::Add(a, b) => Expr::add(a.diff_raw(var), b.diff_raw(var)),
            Expr::Sub(a, b) => Expr::sub(a.diff_raw(var), b.diff_raw(var)),
            Expr::Mul(a, b) => Expr::add(
                Expr::mul(a.diff_raw(var), (**b).clone()),
                Expr::mul((**a).clone(), b.diff_raw(var)),
            ),
            Expr::Div(a, b) => Expr::div(
                Expr::sub(
                    Expr::mul(a.diff_raw(var), (**b).clone()),
                    Expr::mul((**a).clone(), b.diff_raw(var)),
                ),
                Expr::pow((**b).clone(), 2),
            ),
            Expr::Pow(a, e) => Expr::mul(
                Expr::mul(Expr::int(*e as i64), Expr::pow((**a).clone(), e - 1)),
                a.diff_raw(var),
            ),
            Expr::Sin(a) => Expr::mul(Expr::cos((**a).clone()), a.diff_raw(var)),
            Expr::Cos(a) => Expr::mul(Expr::neg(Expr::sin((**a).clone())), a.diff_raw(var)),
            Expr::Exp(a) => Expr::mul(Expr::exp((**a).clone()), a.diff_raw(var)),
        }
    }

    /// Replace every `x_i` with `values[i]`.
    pub fn substitute(&self, values: &[Expr]) -> Expr {
        self.subst_raw(values).tidy()
    }

    fn subst_raw(&self, values: &[Expr]) -> Expr {
        match self {
            Expr::Const(_) => self.clone(),
            Expr::Var(i) => values.get(*i).cloned().unwrap_or(Expr::Var(*i)),
            Expr::Add(a, b) => Expr::add(a.subst_raw(values), b.subst_raw(values)),
            Expr::Sub(a, b) => Expr::sub(a.subst_raw(values), b.subst_raw(values)),
            Expr::Mul(a, b) => Expr::mul(a.subst_raw(values), b.subst_raw(values)),
            Expr::Div(a, b) => Expr::div(a.subst_raw(values), b.subst_raw(values)),
            Expr::Pow(a, e) => Expr::pow(a.subst_raw(values), *e),
            Expr::Sin(a) => Expr::sin(a.subst_raw(values)),
            Expr::Cos(a) => Expr::cos(a.subst_raw(values)),
            Expr::Exp(a) => Expr::exp(a.subst_raw(values)),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) | Expr::Div(..) => 2,
            Expr::Pow(..) => 3,
            _ => 4,
        }
    }
}

// a leading minus would fold into this constant when parsed back
fn leads_with_const(e: &Expr) -> bool {
    match e {
        Expr::Const(_) => true,
        Expr::Mul(a, _) | Expr::Div(a, _) => leads_with_const(a),
        _ => false,
    }
}

struct Paren<'a>(&'a Expr, bool);

impl fmt::Display for Paren<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            Expr::Const(Scalar::Exact(r)) => write!(f, "{}", fmt_rational(r)),
            Expr::Const(Scalar::Float(x)) => {
                if *x < 0.0 {
                    write!(f, "({:?})", x)
                } else {
                    write!(f, "{:?}", x)
                }
            }
            Expr::Var(i) => write!(f, "x{}", i),
            Expr::Add(a, b) => write!(f, "{} + {}", a, Paren(b, b.precedence() <= p)),
            Expr::Sub(a, b) => write!(f, "{} - {}", a, Paren(b, b.precedence() <= p)),
            Expr::Mul(a, b)
                if !leads_with_const(b)
                    && matches!(**a, Expr::Const(Scalar::Exact(ref r)) if *r == -BigRational::one()) =>
            {
                write!(f, "-{}", Paren(b, b.precedence() < p))
            }
            Expr::Mul(a, b) => write!(
                f,
                "{}*{}",
                Paren(a, a.precedence() < p),
                Paren(b, b.precedence() <= p)
            ),
            Expr::Div(a, b) => write!(
                f,
                "{}/{}",
                Paren(a, a.precedence() < p),
                Paren(b, b.precedence() <= p)
            ),
            Expr::Pow(a, e) => write!(f, "{}^{}", Paren(a, a.precedence() <= p), e),
            Expr::Sin(a) => write!(f, "sin({})", a),
            Expr::Cos(a) => write!(f, "cos({})", a),
            Expr::Exp(a) => write!(f, "exp({})", a),
        }
    }
}

impl serde::Serialize for Expr {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}
