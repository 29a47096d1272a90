//! Differential 1-forms on the pieces and on the glued space.
//!
//! A 1-form on a Euclidean piece is its coefficient vector. A 1-form on
//! `X₁ ∪_f X₂` is a pair `(ω₁, ω₂)` whose restrictions to `Y` agree:
//! `i*ω₁ = f*(j*ω₂)`. [`FormPair`] can only be obtained through
//! [`glue_forms`], which checks that condition.

use std::fmt;

use num_rational::BigRational;
use num_traits::One;
use serde::Serialize;
use thiserror::Error;

use crate::equal::{Equality, EqualityError, EqualityOracle};
use crate::expr::Expr;
use crate::map::{MapError, SmoothMap};
use crate::scalar::{Mode, Scalar};
use crate::space::{GluedSpace, Piece, Plot};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FormError {
    #[error("form has {found} coefficients, the space has dimension {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("form lives on {found}, expected {expected}")]
    WrongPiece { expected: Piece, found: Piece },
    #[error("forms are not compatible: i*w1 - f*j*w2 = {difference}")]
    IncompatibleForms { difference: PulledForm },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Equality(#[from] EqualityError),
}

/// Anything with a coefficient vector `Σ cᵢ dxⁱ`.
pub trait Coefficients {
    fn coeffs(&self) -> &[Expr];

    fn ambient_dim(&self) -> usize {
        self.coeffs().len()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OneForm {
    piece: Piece,
    coeffs: Vec<Expr>,
}

impl OneForm {
    pub fn new(piece: Piece, coeffs: Vec<Expr>) -> Self {
        OneForm { piece, coeffs }
    }

    pub fn zero(piece: Piece, dim: usize) -> Self {
        OneForm::new(piece, vec![Expr::zero(); dim])
    }

    /// `dxⁱ`
    pub fn basis(piece: Piece, dim: usize, i: usize) -> Self {
        let mut c = vec![Expr::zero(); dim];
        c[i] = Expr::one();
        OneForm::new(piece, c)
    }

    pub fn piece(&self) -> Piece {
        self.piece
    }

    pub fn dim(&self) -> usize {
        self.coeffs.len()
    }

    fn on(&self, space: &GluedSpace, piece: Piece) -> Result<(), FormError> {
        if self.piece != piece {
            return Err(FormError::WrongPiece {
                expected: piece,
                found: self.piece,
            });
        }
        let d = space.piece_dim(piece);
        if self.dim() != d {
            return Err(FormError::DimensionMismatch {
                expected: d,
                found: self.dim(),
            });
        }
        Ok(())
    }

    pub fn equals(&self, other: &OneForm, oracle: &EqualityOracle) -> Result<Equality, FormError> {
        if self.piece != other.piece {
            return Ok(Equality {
                equal: false,
                mode: Mode::Exact,
            });
        }
        Ok(oracle.equal_all(&self.coeffs, &other.coeffs, self.dim())?)
    }
}

impl Coefficients for OneForm {
    fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }
}

/// A 1-form on a parameter domain `R^m`: the pullback of a form along a
/// plot, or a form on `Y` in its affine chart.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulledForm {
    domain_dim: usize,
    coeffs: Vec<Expr>,
}

impl PulledForm {
    pub fn new(coeffs: Vec<Expr>) -> Self {
        PulledForm {
            domain_dim: coeffs.len(),
            coeffs,
        }
    }

    pub fn zero(domain_dim: usize) -> Self {
        PulledForm::new(vec![Expr::zero(); domain_dim])
    }

    pub fn domain_dim(&self) -> usize {
        self.domain_dim
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs
            .iter()
            .all(|c| c.to_poly().is_some_and(|p| p.is_zero()))
    }

    pub fn sub(&self, other: &PulledForm) -> PulledForm {
        PulledForm::new(
            self.coeffs
                .iter()
                .zip(&other.coeffs)
                .map(|(a, b)| Expr::sub(a.clone(), b.clone()).tidy())
                .collect(),
        )
    }

    pub fn equals(
        &self,
        other: &PulledForm,
        oracle: &EqualityOracle,
    ) -> Result<Equality, FormError> {
        if self.domain_dim != other.domain_dim {
            return Ok(Equality {
                equal: false,
                mode: Mode::Exact,
            });
        }
        Ok(oracle.equal_all(&self.coeffs, &other.coeffs, self.domain_dim)?)
    }
}

impl Coefficients for PulledForm {
    fn coeffs(&self) -> &[Expr] {
        &self.coeffs
    }
}

fn fmt_coeffs(coeffs: &[Expr], f: &mut fmt::Formatter<'_>) -> fmt::Result {
    let mut first = true;
    for (i, c) in coeffs.iter().enumerate() {
        if c.is_zero_const() {
            continue;
        }
        if !first {
            f.write_str(" + ")?;
        }
        first = false;
        if c.to_poly()
            .and_then(|p| p.as_constant())
            .is_some_and(|k| k.is_one())
        {
            write!(f, "dx{}", i)?;
        } else if matches!(c, Expr::Add(..) | Expr::Sub(..)) {
            write!(f, "({}) dx{}", c, i)?;
        } else {
            write!(f, "{} dx{}", c, i)?;
        }
    }
    if first {
        f.write_str("0")?;
    }
    Ok(())
}

impl fmt::Display for OneForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_coeffs(&self.coeffs, f)
    }
}

impl fmt::Display for PulledForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt_coeffs(&self.coeffs, f)
    }
}

/// `m*w`: coefficient `j` is `Σᵢ wᵢ(m(u)) ∂mᵢ/∂uⱼ`.
pub fn pullback(w: &impl Coefficients, m: &SmoothMap) -> Result<PulledForm, FormError> {
    if m.codomain_dim() != w.ambient_dim() {
        return Err(FormError::DimensionMismatch {
            expected: w.ambient_dim(),
            found: m.codomain_dim(),
        });
    }
    let moved: Vec<Expr> = w
        .coeffs()
        .iter()
        .map(|c| c.substitute(m.components()))
        .collect();
    let jac = m.derivative();
    let coeffs = (0..m.domain_dim())
        .map(|j| {
            moved
                .iter()
                .zip(&jac)
                .fold(Expr::zero(), |acc, (c, row)| {
                    Expr::add(acc, Expr::mul(c.clone(), row[j].clone()))
                })
                .tidy()
        })
        .collect();
    Ok(PulledForm::new(coeffs))
}

/// `i*ω₁`, expressed in the chart of `Y`.
pub fn restrict_to_y(space: &GluedSpace, w1: &OneForm) -> Result<PulledForm, FormError> {
    w1.on(space, Piece::P1)?;
    pullback(w1, space.gluing().domain().param())
}

/// `f*(j*ω₂)`, expressed in the chart of `Y`.
pub fn pull_through_f(space: &GluedSpace, w2: &OneForm) -> Result<PulledForm, FormError> {
    w2.on(space, Piece::P2)?;
    pullback(w2, space.gluing().map_on_params())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Compatibility {
    pub compatible: bool,
    pub mode: Mode,
    /// `i*ω₁ − f*(j*ω₂)`
    pub difference: PulledForm,
}

pub fn check_compatible(
    space: &GluedSpace,
    w1: &OneForm,
    w2: &OneForm,
    oracle: &EqualityOracle,
) -> Result<Compatibility, FormError> {
    let left = restrict_to_y(space, w1)?;
    let right = pull_through_f(space, w2)?;
    let eq = left.equals(&right, oracle)?;
    Ok(Compatibility {
        compatible: eq.equal,
        mode: eq.mode,
        difference: left.sub(&right),
    })
}

/// Every form is f-invariant when `f` is injective, which all gluing maps
/// of this crate are.
pub fn is_f_invariant(_space: &GluedSpace, _w1: &OneForm) -> bool {
    true
}

/// A compatible pair, i.e. the form `ω₁ ∪_f ω₂` on the glued space.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FormPair {
    w1: OneForm,
    w2: OneForm,
    verified: bool,
    mode: Mode,
}

impl FormPair {
    pub fn w1(&self) -> &OneForm {
        &self.w1
    }

    pub fn w2(&self) -> &OneForm {
        &self.w2
    }

    pub fn verified(&self) -> bool {
        self.verified
    }

    /// How compatibility was decided.
    pub fn mode(&self) -> Mode {
        self.mode
    }

    /// The pullback `π*(ω₁ ∪_f ω₂) = (ω₁, ω₂)`.
    pub fn split(self) -> (OneForm, OneForm) {
        (self.w1, self.w2)
    }
}

/// Builds `ω₁ ∪_f ω₂`, failing with the offending difference when the pair
/// is incompatible.
pub fn glue_forms(
    space: &GluedSpace,
    w1: OneForm,
    w2: OneForm,
    oracle: &EqualityOracle,
) -> Result<FormPair, FormError> {
    let c = check_compatible(space, &w1, &w2, oracle)?;
    if !c.compatible {
        return Err(FormError::IncompatibleForms {
            difference: c.difference,
        });
    }
    Ok(FormPair {
        w1,
        w2,
        verified: true,
        mode: c.mode,
    })
}

pub fn split_glued_form(fp: FormPair) -> (OneForm, OneForm) {
    fp.split()
}

/// `(ω₁ ∪_f ω₂)(p) = ωᵢ(pᵢ)` for the lift `pᵢ` of `p`.
pub fn evaluate_on_plot(fp: &FormPair, plot: &Plot) -> Result<PulledForm, FormError> {
    let w = match plot.lift_tag() {
        Piece::P1 => &fp.w1,
        Piece::P2 => &fp.w2,
    };
    pullback(w, plot.lift_map())
}

/// A pair `(ω₁, ω₂)` with `i*ω₁ = pf` and `f*(j*ω₂) = pf`, obtained by
/// pulling `pf` back along the affine left inverses. The result has zero
/// component along directions transverse to `Y` and `f(Y)`.
pub fn extend_form_from_y(
    space: &GluedSpace,
    pf: &PulledForm,
) -> Result<(OneForm, OneForm), FormError> {
    let g = space.gluing();
    if pf.domain_dim() != g.dim() {
        return Err(FormError::DimensionMismatch {
            expected: g.dim(),
            found: pf.domain_dim(),
        });
    }
    let out1 = pullback(pf, g.domain().left_inverse())?;
    let to_params = g.inverse_on_params().compose(g.image().left_inverse())?;
    let out2 = pullback(pf, &to_params)?;
    Ok((
        OneForm::new(Piece::P1, out1.coeffs),
        OneForm::new(Piece::P2, out2.coeffs),
    ))
}

pub fn add_forms(a: &OneForm, b: &OneForm) -> Result<OneForm, FormError> {
    if a.piece != b.piece {
        return Err(FormError::WrongPiece {
            expected: a.piece,
            found: b.piece,
        });
    }
    if a.dim() != b.dim() {
        return Err(FormError::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(OneForm::new(
        a.piece,
        a.coeffs
            .iter()
            .zip(&b.coeffs)
            .map(|(x, y)| Expr::add(x.clone(), y.clone()).tidy())
            .collect(),
    ))
}

pub fn scale_form(k: &Scalar, w: &OneForm) -> OneForm {
    OneForm::new(
        w.piece,
        w.coeffs
            .iter()
            .map(|c| Expr::mul(Expr::Const(k.clone()), c.clone()).tidy())
            .collect(),
    )
}

impl FormPair {
    /// Sum of two glued forms; compatibility is re-verified.
    pub fn add(
        &self,
        other: &FormPair,
        space: &GluedSpace,
        oracle: &EqualityOracle,
    ) -> Result<FormPair, FormError> {
        glue_forms(
            space,
            add_forms(&self.w1, &other.w1)?,
            add_forms(&self.w2, &other.w2)?,
            oracle,
        )
    }

    pub fn scale(
        &self,
        k: &BigRational,
        space: &GluedSpace,
        oracle: &EqualityOracle,
    ) -> Result<FormPair, FormError> {
        let k = Scalar::Exact(k.clone());
        glue_forms(
            space,
            scale_form(&k, &self.w1),
            scale_form(&k, &self.w2),
            oracle,
        )
    }
}
