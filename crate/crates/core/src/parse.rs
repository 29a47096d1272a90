//! Recursive-descent parser for the expression grammar
//!
//! ```text
//! expr   := term (('+'|'-') term)*
//! term   := factor (('*'|'/') factor)*
//! factor := '-' factor | base ('^' int)?
//! base   := number | 'x' nat | '(' expr ')' | ('sin'|'cos'|'exp') '(' expr ')'
//! ```
//!
//! Whitespace is insignificant. Decimal literals are read as exact rationals.
//! The same machinery parses 1-form bodies (`x1 dx0 + x0 dx1`) and, for
//! scene files, expressions over named binders (`t -> (0, t)`).

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;
use thiserror::Error;

use crate::expr::Expr;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("unexpected character {0:?}")]
    UnexpectedChar(char),
    #[error("unexpected {found}, expected {expected}")]
    UnexpectedToken {
        found: String,
        expected: &'static str,
    },
    #[error("unexpected end of input, expected {0}")]
    UnexpectedEnd(&'static str),
    #[error("unknown identifier {0:?}")]
    UnknownIdentifier(String),
    #[error("variable x{index} out of range for dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("exponent out of range")]
    BadExponent,
}

#[derive(Debug, Clone, PartialEq)]
pub(crate) enum Tok {
    Num(BigRational),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    Comma,
    Arrow,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(n) => format!("number {}", n),
            Tok::Ident(s) => format!("identifier {:?}", s),
            Tok::Plus => "'+'".into(),
            Tok::Minus => "'-'".into(),
            Tok::Star => "'*'".into(),
            Tok::Slash => "'/'".into(),
            Tok::Caret => "'^'".into(),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
            Tok::Comma => "','".into(),
            Tok::Arrow => "'->'".into(),
        }
    }
}

pub(crate) fn lex(text: &str) -> Result<Vec<(Tok, usize)>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        let start = i;
        match c {
            b' ' | b'\t' | b'\n' | b'\r' => {
                i += 1;
                continue;
            }
            b'+' => out.push((Tok::Plus, start)),
            b'-' if bytes.get(i + 1) == Some(&b'>') => {
                out.push((Tok::Arrow, start));
                i += 1;
            }
            b'-' => out.push((Tok::Minus, start)),
            b'*' => out.push((Tok::Star, start)),
            b'/' => out.push((Tok::Slash, start)),
            b'^' => out.push((Tok::Caret, start)),
            b'(' => out.push((Tok::LParen, start)),
            b')' => out.push((Tok::RParen, start)),
            b',' => out.push((Tok::Comma, start)),
            b'0'..=b'9' | b'.' => {
                let (value, end) = lex_number(text, start)?;
                out.push((Tok::Num(value), start));
                i = end;
                continue;
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                let mut end = i;
                while end < bytes.len()
                    && (bytes[end].is_ascii_alphanumeric() || bytes[end] == b'_')
                {
                    end += 1;
                }
                out.push((Tok::Ident(text[start..end].to_string()), start));
                i = end;
                continue;
            }
            _ => {
                let ch = text[start..].chars().next().unwrap();
                return Err(ParseError {
                    kind: ParseErrorKind::UnexpectedChar(ch),
                    offset: start,
                });
            }
        }
        i += 1;
    }
    Ok(out)
}

fn lex_number(text: &str, start: usize) -> Result<(BigRational, usize), ParseError> {
    let bytes = text.as_bytes();
    let mut i = start;
    let mut digits = String::new();
    let mut frac_len = 0u32;
    while i < bytes.len() && bytes[i].is_ascii_digit() {
        digits.push(bytes[i] as char);
        i += 1;
    }
    if i < bytes.len() && bytes[i] == b'.' {
        i += 1;
        while i < bytes.len() && bytes[i].is_ascii_digit() {
            digits.push(bytes[i] as char);
            frac_len += 1;
            i += 1;
        }
    }
    if digits.is_empty() {
        return Err(ParseError {
            kind: ParseErrorKind::UnexpectedChar('.'),
            offset: start,
        });
    }
    let mut exp: i64 = -(frac_len as i64);
    // optional exponent, only when followed by a digit (or sign + digit)
    if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
        let mut j = i + 1;
        let mut neg = false;
        if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
            neg = bytes[j] == b'-';
            j += 1;
        }
        let exp_start = j;
        while j < bytes.len() && bytes[j].is_ascii_digit() {
            j += 1;
        }
        if j > exp_start {
            let e: i64 = text[exp_start..j].parse().map_err(|_| ParseError {
                kind: ParseErrorKind::BadExponent,
                offset: exp_start,
            })?;
            if e > 4096 {
                return Err(ParseError {
                    kind: ParseErrorKind::BadExponent,
                    offset: exp_start,
                });
            }
            exp += if neg { -e } else { e };
            i = j;
        }
    }
    let mantissa: BigInt = digits.parse().unwrap();
    let ten = BigInt::from(10);
    let value = if exp >= 0 {
        BigRational::from_integer(mantissa * num_traits::pow(ten, exp as usize))
    } else {
        BigRational::new(mantissa, num_traits::pow(ten, (-exp) as usize))
    };
    Ok((value, i))
}

/// How identifiers resolve to variable indices.
#[derive(Clone, Debug)]
pub enum Vars<'a> {
    /// `x0 … x{dim-1}`
    Indexed(usize),
    /// Named binders; position is the variable index.
    Named(&'a [String]),
}

pub(crate) struct Parser<'a> {
    toks: &'a [(Tok, usize)],
    pos: usize,
    end: usize,
    vars: Vars<'a>,
}

impl<'a> Parser<'a> {
    pub(crate) fn new(toks: &'a [(Tok, usize)], end: usize, vars: Vars<'a>) -> Self {
        Parser {
            toks,
            pos: 0,
            end,
            vars,
        }
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.toks.get(self.pos).map(|(_, o)| *o).unwrap_or(self.end)
    }

    fn error(&self, expected: &'static str) -> ParseError {
        match self.toks.get(self.pos) {
            Some((t, o)) => ParseError {
                kind: ParseErrorKind::UnexpectedToken {
                    found: t.describe(),
                    expected,
                },
                offset: *o,
            },
            None => ParseError {
                kind: ParseErrorKind::UnexpectedEnd(expected),
                offset: self.end,
            },
        }
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, t: &Tok, what: &'static str) -> Result<(), ParseError> {
        if self.eat(t) {
            Ok(())
        } else {
            Err(self.error(what))
        }
    }

    pub(crate) fn at_end(&self) -> bool {
        self.pos >= self.toks.len()
    }

    pub(crate) fn finish(&self) -> Result<(), ParseError> {
        if self.at_end() {
            Ok(())
        } else {
            Err(self.error("end of input"))
        }
    }

    pub(crate) fn expr(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.term()?;
        loop {
            if self.eat(&Tok::Plus) {
                let rhs = self.term()?;
                acc = Expr::Add(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Minus) {
                let rhs = self.term()?;
                acc = Expr::Sub(Box::new(acc), Box::new(rhs));
            } else {
                return Ok(acc);
            }
        }
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.eat(&Tok::Star) {
                let rhs = self.factor()?;
                acc = Expr::Mul(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.factor()?;
                acc = quotient(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        if self.eat(&Tok::Minus) {
            let inner = self.factor()?;
            return Ok(match inner {
                Expr::Const(s) => Expr::Const(s.neg()),
                other => Expr::Mul(Box::new(Expr::int(-1)), Box::new(other)),
            });
        }
        let base = self.base()?;
        if self.eat(&Tok::Caret) {
            let neg = self.eat(&Tok::Minus);
            let off = self.offset();
            let n = match self.peek() {
                Some(Tok::Num(n)) if n.is_integer() => n.to_integer(),
                _ => return Err(self.error("integer exponent")),
            };
            self.pos += 1;
            let e: i32 = i32::try_from(n).map_err(|_| ParseError {
                kind: ParseErrorKind::BadExponent,
                offset: off,
            })?;
            return Ok(Expr::Pow(Box::new(base), if neg { -e } else { e }));
        }
        Ok(base)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        let off = self.offset();
        match self.peek().cloned() {
            Some(Tok::Num(n)) => {
                self.pos += 1;
                Ok(Expr::Const(Scalar::Exact(n)))
            }
            Some(Tok::LParen) => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(&Tok::RParen, "')'")?;
                Ok(e)
            }
            Some(Tok::Ident(name)) => {
                if let Some(f) = match name.as_str() {
                    "sin" => Some(Expr::Sin as fn(Box<Expr>) -> Expr),
                    "cos" => Some(Expr::Cos as fn(Box<Expr>) -> Expr),
                    "exp" => Some(Expr::Exp as fn(Box<Expr>) -> Expr),
                    _ => None,
                } {
                    self.pos += 1;
                    self.expect(&Tok::LParen, "'(' after function name")?;
                    let arg = self.expr()?;
                    self.expect(&Tok::RParen, "')'")?;
                    return Ok(f(Box::new(arg)));
                }
                let index = self.resolve(&name, off)?;
                self.pos += 1;
                Ok(Expr::Var(index))
            }
            _ => Err(self.error("number, variable or '('")),
        }
    }

    fn resolve(&self, name: &str, offset: usize) -> Result<usize, ParseError> {
        match self.vars {
            Vars::Indexed(dim) => {
                let index = name
                    .strip_prefix('x')
                    .filter(|s| !s.is_empty() && s.bytes().all(|b| b.is_ascii_digit()))
                    .and_then(|s| s.parse::<usize>().ok())
                    .ok_or_else(|| ParseError {
                        kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                        offset,
                    })?;
                if index >= dim {
                    return Err(ParseError {
                        kind: ParseErrorKind::VariableOutOfRange { index, dim },
                        offset,
                    });
                }
                Ok(index)
            }
            Vars::Named(names) => names.iter().position(|n| n == name).ok_or(ParseError {
                kind: ParseErrorKind::UnknownIdentifier(name.to_string()),
                offset,
            }),
        }
    }

    /// Form body: `['-'] fterm (('+'|'-') fterm)*` with
    /// `fterm := [term ['*']] 'dx' nat`, or a lone `0`.
    pub(crate) fn form_body(&mut self, dim: usize) -> Result<Vec<Expr>, ParseError> {
        let mut coeffs = vec![Expr::zero(); dim];
        let mut negate = self.eat(&Tok::Minus);
        if self.peek() == Some(&Tok::Num(BigRational::zero())) && self.toks.len() == self.pos + 1 {
            self.pos += 1;
            return Ok(coeffs);
        }
        loop {
            let coeff = if self.differential_index().is_some() {
                Expr::one()
            } else {
                let c = self.term_before_differential()?;
                self.eat(&Tok::Star);
                c
            };
            let off = self.offset();
            let index = self
                .differential_index()
                .ok_or_else(|| self.error("differential dx<i>"))?;
            if index >= dim {
                return Err(ParseError {
                    kind: ParseErrorKind::VariableOutOfRange { index, dim },
                    offset: off,
                });
            }
            self.pos += 1;
            let coeff = if negate { Expr::neg(coeff) } else { coeff };
            coeffs[index] = if coeffs[index].is_zero_const() {
                coeff
            } else {
                Expr::Add(Box::new(coeffs[index].clone()), Box::new(coeff))
            };
            if self.eat(&Tok::Plus) {
                negate = false;
            } else if self.eat(&Tok::Minus) {
                negate = true;
            } else {
                return Ok(coeffs);
            }
        }
    }

    fn differential_index(&self) -> Option<usize> {
        match self.peek() {
            Some(Tok::Ident(s)) => s
                .strip_prefix("dx")
                .filter(|r| !r.is_empty() && r.bytes().all(|b| b.is_ascii_digit()))
                .and_then(|r| r.parse().ok()),
            _ => None,
        }
    }

    // A term whose factors stop at the first `dx<i>`; juxtaposition
    // `x1 dx0` is allowed only in front of the differential.
    fn term_before_differential(&mut self) -> Result<Expr, ParseError> {
        let mut acc = self.factor()?;
        loop {
            if self.peek() == Some(&Tok::Star) {
                let save = self.pos;
                self.pos += 1;
                if self.differential_index().is_some() {
                    self.pos = save;
                    return Ok(acc);
                }
                let rhs = self.factor()?;
                acc = Expr::Mul(Box::new(acc), Box::new(rhs));
            } else if self.eat(&Tok::Slash) {
                let rhs = self.factor()?;
                acc = quotient(acc, rhs);
            } else {
                return Ok(acc);
            }
        }
    }
}

// `3/4` is a rational literal; everything else stays a quotient node.
fn quotient(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Const(Scalar::Exact(n)), Expr::Const(Scalar::Exact(d))) if !d.is_zero() => {
            Expr::Const(Scalar::Exact(n / d))
        }
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

/// Parse an expression in `x0 … x{ambient_dim-1}`.
pub fn parse_expr(text: &str, ambient_dim: usize) -> Result<Expr, ParseError> {
    parse_expr_with(text, Vars::Indexed(ambient_dim))
}

pub fn parse_expr_with(text: &str, vars: Vars<'_>) -> Result<Expr, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text.len(), vars);
    let e = p.expr()?;
    p.finish()?;
    Ok(e)
}

/// Parse a 1-form body such as `x1 dx0 + x0*dx1` into its coefficient
/// vector of length `dim`.
pub fn parse_form(text: &str, dim: usize) -> Result<Vec<Expr>, ParseError> {
    let toks = lex(text)?;
    let mut p = Parser::new(&toks, text.len(), Vars::Indexed(dim));
    let coeffs = p.form_body(dim)?;
    p.finish()?;
    Ok(coeffs)
}

/// Parse a rational literal, optionally signed, as used for point
/// coordinates (`-3/4`, `0.5`, `2`).
pub fn parse_rational(text: &str) -> Result<BigRational, ParseError> {
    let e = parse_expr(text, 0)?;
    e.to_poly().and_then(|p| p.as_constant()).ok_or(ParseError {
        kind: ParseErrorKind::UnexpectedToken {
            found: text.trim().to_string(),
            expected: "rational number",
        },
        offset: 0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;

    #[test]
    fn product_plus_constant() {
        let e = parse_expr("x0*x1 + 2", 2).unwrap();
        assert_eq!(
            e,
            Expr::Add(
                Box::new(Expr::Mul(Box::new(Expr::Var(0)), Box::new(Expr::Var(1)))),
                Box::new(Expr::int(2))
            )
        );
    }

    #[test]
    fn trig_identity_is_not_rewritten() {
        let e = parse_expr("sin(x0)^2 + cos(x0)^2", 1).unwrap();
        assert!(matches!(e, Expr::Add(..)));
        assert_ne!(e, Expr::one());
    }

    #[test]
    fn variable_out_of_range() {
        let err = parse_expr("x2", 2).unwrap_err();
        assert_eq!(
            err.kind,
            ParseErrorKind::VariableOutOfRange { index: 2, dim: 2 }
        );
        assert_eq!(err.offset, 0);
    }

    #[test]
    fn syntax_error_offset() {
        let err = parse_expr("x0 + * x1", 2).unwrap_err();
        assert_eq!(err.offset, 5);
        let err = parse_expr("x0 + ", 2).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::UnexpectedEnd(_)));
        assert_eq!(err.offset, 5);
    }

    #[test]
    fn unknown_identifier() {
        let err = parse_expr("tan(x0)", 1).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("tan".into()));
    }

    #[test]
    fn decimals_are_exact() {
        let e = parse_expr("0.25", 0).unwrap();
        assert_eq!(e, Expr::rational(ratio(1, 4)));
        assert_eq!(parse_rational("-3/4").unwrap(), ratio(-3, 4));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
    }

    #[test]
    fn negative_exponent() {
        let e = parse_expr("x0^-2", 1).unwrap();
        assert_eq!(e, Expr::Pow(Box::new(Expr::Var(0)), -2));
    }

    #[test]
    fn form_bodies() {
        let c = parse_form("x1 dx0 + x0 dx1", 2).unwrap();
        assert_eq!(c, vec![Expr::Var(1), Expr::Var(0)]);
        let c = parse_form("dx1", 2).unwrap();
        assert_eq!(c, vec![Expr::zero(), Expr::one()]);
        let c = parse_form("0", 3).unwrap();
        assert_eq!(c.len(), 3);
        assert!(c.iter().all(Expr::is_zero_const));
        let c = parse_form("-2*x0*dx0 - (x0 + 1) dx1", 2).unwrap();
        assert_eq!(c[0].to_poly(), parse_expr("-2*x0", 2).unwrap().to_poly());
        assert_eq!(c[1].to_poly(), parse_expr("-x0 - 1", 2).unwrap().to_poly());
        assert!(parse_form("x0 dx2", 2).is_err());
        assert!(parse_form("x0", 2).is_err());
    }

    #[test]
    fn named_binders() {
        let names = vec!["t".to_string(), "s".to_string()];
        let e = parse_expr_with("t*s + 1", Vars::Named(&names)).unwrap();
        assert_eq!(e.var_bound(), 2);
        assert!(parse_expr_with("x0", Vars::Named(&names)).is_err());
    }
}
