//! Fibres of `Λ¹(X₁ ∪_f X₂)`.
//!
//! Off the glue locus the fibre is the standard cotangent fibre of the piece
//! containing the point. At a locus point `x` with lifts `ỹ ∈ Y` and
//! `f(ỹ) ∈ f(Y)` it is the space of compatible pairs `(α₁, α₂)`, i.e. the
//! kernel of `[Aᵀ | −Bᵀ]` where `A` is the Jacobian of the parametrization
//! of `Y` and `B` that of `f` on parameters.
//!
//! [`fibre_oracle`] recomputes the fibre dimension from the definition (all
//! compatible polynomial form pairs modulo those vanishing at `x`), sharing
//! nothing with [`fibre_at`] beyond the form pullbacks.

use std::collections::BTreeMap;

use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::expr::Expr;
use crate::forms::{pull_through_f, restrict_to_y, Coefficients, FormError, OneForm, PulledForm};
use crate::linalg::RatMatrix;
use crate::poly::{Monomial, Poly};
use crate::scalar::{serialize_rationals, EvalError, Mode, Scalar};
use crate::space::{GluedPoint, GluedSpace, Piece, PointClass, SpaceError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FibreError {
    #[error("{0} is not on the glue locus")]
    NotOnLocus(GluedPoint),
    #[error("{map} is not defined over {point} ({class})")]
    Domain {
        map: &'static str,
        point: GluedPoint,
        class: PointClass,
    },
    #[error("covector has {found} components, expected {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("pair does not satisfy the compatibility constraints")]
    NotCompatible,
    #[error("oracle truncation degree must be at least 1")]
    BadDegree,
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Space(#[from] SpaceError),
    #[error(transparent)]
    Form(#[from] FormError),
}

/// A covector `Σ aᵢ dxⁱ` at a point of one of the pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Covector {
    pub base: GluedPoint,
    pub components: Vec<Scalar>,
}

impl Covector {
    pub fn new(base: GluedPoint, components: Vec<Scalar>) -> Self {
        Covector { base, components }
    }

    pub fn exact(base: GluedPoint, components: Vec<BigRational>) -> Self {
        Covector::new(base, components.into_iter().map(Scalar::Exact).collect())
    }

    pub fn zero(base: GluedPoint) -> Self {
        let n = base.coords.len();
        Covector::exact(base, vec![BigRational::zero(); n])
    }

    /// `dxⁱ` at `base`.
    pub fn basis(base: GluedPoint, i: usize) -> Self {
        let n = base.coords.len();
        let mut c = vec![BigRational::zero(); n];
        c[i] = BigRational::one();
        Covector::exact(base, c)
    }

    pub fn piece(&self) -> Piece {
        self.base.tag
    }

    pub fn exact_components(&self) -> Option<Vec<BigRational>> {
        self.components
            .iter()
            .map(|s| s.as_exact().cloned())
            .collect()
    }

    pub fn mode(&self) -> Mode {
        self.components
            .iter()
            .fold(Mode::Exact, |m, s| m.and(s.mode()))
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.components.iter().map(Scalar::to_f64).collect()
    }
}

/// A compatible pair `(α₁, α₂)` over a glue-locus point.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GlueFibreElement {
    pub a1: Covector,
    pub a2: Covector,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(untagged)]
pub enum FibreElement {
    Interior(Covector),
    Glue(GlueFibreElement),
}

impl FibreElement {
    /// Coordinates in `Λ¹` of the piece (interior) or of the direct sum
    /// (locus, `α₁` first).
    pub fn flat(&self) -> Vec<Scalar> {
        match self {
            FibreElement::Interior(c) => c.components.clone(),
            FibreElement::Glue(g) => {
                g.a1.components
                    .iter()
                    .chain(&g.a2.components)
                    .cloned()
                    .collect()
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FibreDescription {
    pub point: GluedPoint,
    pub case: PointClass,
    pub dim: usize,
    pub basis: Vec<FibreElement>,
    /// `[Aᵀ | −Bᵀ]`, on the locus only.
    pub constraints: Option<RatMatrix>,
}

/// Value `α_x` of a form at a point of its piece.
pub fn value_at(w: &OneForm, x: &[BigRational]) -> Result<Covector, FibreError> {
    if x.len() != w.dim() {
        return Err(FibreError::DimensionMismatch {
            expected: w.dim(),
            found: x.len(),
        });
    }
    let components = w
        .coeffs()
        .iter()
        .map(|c| c.eval_scalar(x))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Covector::new(
        GluedPoint::new(w.piece(), x.to_vec()),
        components,
    ))
}

fn locus_parameter(space: &GluedSpace, y: &GluedPoint) -> Result<Vec<BigRational>, FibreError> {
    space
        .locus_parameter(y)?
        .ok_or_else(|| FibreError::NotOnLocus(y.clone()))
}

/// The `k × (d₁ + d₂)` matrix `[Aᵀ | −Bᵀ]` whose kernel is the set of
/// compatible covector pairs at the locus point `y`.
pub fn compatible_pair_constraints(
    space: &GluedSpace,
    y: &GluedPoint,
) -> Result<RatMatrix, FibreError> {
    let t = locus_parameter(space, y)?;
    let g = space.gluing();
    let a = g.domain().param().jacobian(&t).map_err(SpaceError::from)?;
    let b = g.map_on_params().jacobian(&t).map_err(SpaceError::from)?;
    let d1 = space.piece1().dim;
    let d2 = space.piece2().dim;
    Ok(RatMatrix::from_fn(g.dim(), d1 + d2, |r, c| {
        if c < d1 {
            a.get(c, r).clone()
        } else {
            -b.get(c - d1, r).clone()
        }
    }))
}

pub fn fibre_at(space: &GluedSpace, x: &GluedPoint) -> Result<FibreDescription, FibreError> {
    let point = space.canonicalize(x)?;
    let case = space.classify_point(&point)?;
    let lifts = space.lift_point(&point)?;
    match case {
        PointClass::Interior1 | PointClass::Interior2 => {
            let base = lifts[0].clone();
            let d = base.coords.len();
            let basis = (0..d)
                .map(|i| FibreElement::Interior(Covector::basis(base.clone(), i)))
                .collect();
            Ok(FibreDescription {
                point,
                case,
                dim: d,
                basis,
                constraints: None,
            })
        }
        PointClass::GlueLocus => {
            let constraints = compatible_pair_constraints(space, &point)?;
            let d1 = space.piece1().dim;
            let (l1, l2) = (lifts[0].clone(), lifts[1].clone());
            let basis: Vec<FibreElement> = constraints
                .nullspace()
                .into_iter()
                .map(|mut v| {
                    let a2 = v.split_off(d1);
                    FibreElement::Glue(GlueFibreElement {
                        a1: Covector::exact(l1.clone(), v),
                        a2: Covector::exact(l2.clone(), a2),
                    })
                })
                .collect();
            Ok(FibreDescription {
                point,
                case,
                dim: basis.len(),
                basis,
                constraints: Some(constraints),
            })
        }
    }
}

/// Whether `(α₁, α₂)` satisfies the constraints at `y`: exactly for exact
/// data, within `tol` (max-abs residual) otherwise.
pub fn is_compatible_pair(
    space: &GluedSpace,
    y: &GluedPoint,
    a1: &Covector,
    a2: &Covector,
    tol: f64,
) -> Result<bool, FibreError> {
    let c = compatible_pair_constraints(space, y)?;
    let (d1, d2) = (space.piece1().dim, space.piece2().dim);
    if a1.components.len() != d1 {
        return Err(FibreError::DimensionMismatch {
            expected: d1,
            found: a1.components.len(),
        });
    }
    if a2.components.len() != d2 {
        return Err(FibreError::DimensionMismatch {
            expected: d2,
            found: a2.components.len(),
        });
    }
    if let (Some(u), Some(v)) = (a1.exact_components(), a2.exact_components()) {
        let flat: Vec<BigRational> = u.into_iter().chain(v).collect();
        return Ok(c.apply(&flat).iter().all(Zero::is_zero));
    }
    let flat: Vec<f64> = a1.to_f64().into_iter().chain(a2.to_f64()).collect();
    let cf = c.to_f64();
    Ok((0..cf.rows()).all(|r| {
        let s: f64 = cf.row(r).iter().zip(&flat).map(|(a, b)| a * b).sum();
        s.abs() <= tol
    }))
}

/// `ρ̃₁^Λ`: defined over `i₁(X₁∖Y) ∪ i₂(f(Y))`.
pub fn rho1(e: &FibreElement) -> Result<Covector, FibreError> {
    match e {
        FibreElement::Glue(g) => Ok(g.a1.clone()),
        FibreElement::Interior(c) if c.piece() == Piece::P1 => Ok(c.clone()),
        FibreElement::Interior(c) => Err(FibreError::Domain {
            map: "rho1",
            point: c.base.clone(),
            class: PointClass::Interior2,
        }),
    }
}

/// `ρ̃₂^Λ`: defined over `i₂(X₂)`.
pub fn rho2(e: &FibreElement) -> Result<Covector, FibreError> {
    match e {
        FibreElement::Glue(g) => Ok(g.a2.clone()),
        FibreElement::Interior(c) if c.piece() == Piece::P2 => Ok(c.clone()),
        FibreElement::Interior(c) => Err(FibreError::Domain {
            map: "rho2",
            point: c.base.clone(),
            class: PointClass::Interior1,
        }),
    }
}

/// Inverse of `ρ̃₁^Λ` on fibres over `i₁(X₁∖Y)`.
pub fn rho1_inverse(space: &GluedSpace, v: &Covector) -> Result<FibreElement, FibreError> {
    let class = space.classify_point(&v.base)?;
    if v.piece() != Piece::P1 || class != PointClass::Interior1 {
        return Err(FibreError::Domain {
            map: "rho1_inverse",
            point: v.base.clone(),
            class,
        });
    }
    check_len(v, space.piece1().dim)?;
    Ok(FibreElement::Interior(v.clone()))
}

/// Inverse of `ρ̃₂^Λ` on fibres over `i₂(X₂∖f(Y))`.
pub fn rho2_inverse(space: &GluedSpace, v: &Covector) -> Result<FibreElement, FibreError> {
    let class = space.classify_point(&v.base)?;
    if v.piece() != Piece::P2 || class != PointClass::Interior2 {
        return Err(FibreError::Domain {
            map: "rho2_inverse",
            point: v.base.clone(),
            class,
        });
    }
    check_len(v, space.piece2().dim)?;
    Ok(FibreElement::Interior(v.clone()))
}

/// Inverse of `ρ̃₁^Λ ⊕_comp ρ̃₂^Λ` over a glue-locus point.
pub fn rho_pair_inverse(
    space: &GluedSpace,
    a1: &Covector,
    a2: &Covector,
) -> Result<FibreElement, FibreError> {
    let lifts = space.lift_point(&a2.base)?;
    if lifts.len() != 2 || a2.piece() != Piece::P2 || lifts[0] != a1.base {
        return Err(FibreError::NotOnLocus(a2.base.clone()));
    }
    if !is_compatible_pair(space, &a2.base, a1, a2, crate::equal::DEFAULT_TOLERANCE)? {
        return Err(FibreError::NotCompatible);
    }
    Ok(FibreElement::Glue(GlueFibreElement {
        a1: a1.clone(),
        a2: a2.clone(),
    }))
}

fn check_len(v: &Covector, d: usize) -> Result<(), FibreError> {
    if v.components.len() != d {
        return Err(FibreError::DimensionMismatch {
            expected: d,
            found: v.components.len(),
        });
    }
    Ok(())
}

/// "The value of `ω_piece` at `point` is zero": `dim` linear conditions.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VanishingCondition {
    pub piece: Piece,
    #[serde(serialize_with = "serialize_rationals")]
    pub point: Vec<BigRational>,
    pub dim: usize,
}

/// Conditions cutting out the pairs `(ω₁, ω₂)` whose glued form vanishes
/// at `x`: one block per lift of `x`.
pub fn vanishing_constraints(
    space: &GluedSpace,
    x: &GluedPoint,
) -> Result<Vec<VanishingCondition>, FibreError> {
    Ok(space
        .lift_point(x)?
        .into_iter()
        .map(|l| VanishingCondition {
            piece: l.tag,
            dim: space.piece_dim(l.tag),
            point: l.coords,
        })
        .collect())
}

/// Default polynomial truncation degree for [`fibre_oracle`].
pub const DEFAULT_ORACLE_DEGREE: u32 = 2;

/// Dimension of `Λ¹_x` computed from the definition, restricted to forms
/// with polynomial coefficients of total degree `≤ degree`: the rank of the
/// evaluation map at `x` on the space of compatible pairs.
pub fn fibre_oracle(space: &GluedSpace, x: &GluedPoint, degree: u32) -> Result<usize, FibreError> {
    if degree < 1 {
        return Err(FibreError::BadDegree);
    }
    // unknowns: (piece, coefficient index, monomial)
    let mut unknowns: Vec<(Piece, usize, Monomial)> = Vec::new();
    for piece in [Piece::P1, Piece::P2] {
        let d = space.piece_dim(piece);
        let monomials = Monomial::up_to_degree(d, degree);
        for i in 0..d {
            for m in &monomials {
                unknowns.push((piece, i, m.clone()));
            }
        }
    }
    let n = unknowns.len();
    let k = space.gluing().dim();

    // compatibility: i*ω₁ − f*j*ω₂ = 0, one column per unknown
    let mut compat_rows: BTreeMap<(usize, Monomial), Vec<BigRational>> = BTreeMap::new();
    for (col, (piece, i, m)) in unknowns.iter().enumerate() {
        let d = space.piece_dim(*piece);
        let mut coeffs = vec![Expr::zero(); d];
        coeffs[*i] = Poly::term(m.clone(), BigRational::one()).to_expr();
        let w = OneForm::new(*piece, coeffs);
        let pulled: PulledForm = match piece {
            Piece::P1 => restrict_to_y(space, &w)?,
            Piece::P2 => pull_through_f(space, &w)?,
        };
        let sign = if *piece == Piece::P1 {
            BigRational::one()
        } else {
            -BigRational::one()
        };
        for (j, c) in pulled.coeffs().iter().enumerate().take(k) {
            let p = c
                .to_poly()
                .expect("pullback of a polynomial form is polynomial");
            for (mono, coef) in p.terms() {
                let row = compat_rows
                    .entry((j, mono.clone()))
                    .or_insert_with(|| vec![BigRational::zero(); n]);
                row[col] += coef * &sign;
            }
        }
    }
    let compat: Vec<Vec<BigRational>> = compat_rows.into_values().collect();

    // evaluation at each lift
    let mut eval: Vec<Vec<BigRational>> = Vec::new();
    for cond in vanishing_constraints(space, x)? {
        for i in 0..cond.dim {
            eval.push(
                unknowns
                    .iter()
                    .map(|(piece, j, m)| {
                        if *piece == cond.piece && *j == i {
                            Poly::term(m.clone(), BigRational::one()).eval(&cond.point)
                        } else {
                            BigRational::zero()
                        }
                    })
                    .collect(),
            );
        }
    }
    let r_compat = gauss_rank(compat.clone());
    let stacked: Vec<Vec<BigRational>> = compat.into_iter().chain(eval).collect();
    Ok(gauss_rank(stacked) - r_compat)
}

// Plain Gauss-Jordan rank, kept separate from `linalg`.
fn gauss_rank(mut rows: Vec<Vec<BigRational>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][c].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][c].clone();
        for r in 0..rows.len() {
            if r != rank && !rows[r][c].is_zero() {
                let f = &rows[r][c] / &pivot;
                for j in c..cols {
                    let v = &f * &rows[rank][j];
                    rows[r][j] -= v;
                }
            }
        }
        rank += 1;
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::equal::EqualityOracle;
    use crate::forms::glue_forms;
    use crate::parse::parse_form;
    use crate::scalar::rat;
    use crate::space::fixtures::*;

    fn pt(tag: Piece, c: &[i64]) -> GluedPoint {
        GluedPoint::new(tag, c.iter().map(|&v| rat(v)).collect())
    }

    fn ints(v: &[i64]) -> Vec<BigRational> {
        v.iter().map(|&x| rat(x)).collect()
    }

    #[test]
    fn values_at_points() {
        let w = OneForm::new(Piece::P1, parse_form("x1 dx0 + x0 dx1", 2).unwrap());
        let v = value_at(&w, &ints(&[1, 2])).unwrap();
        assert_eq!(v.exact_components().unwrap(), ints(&[2, 1]));
        let z = value_at(&OneForm::zero(Piece::P2, 2), &ints(&[4, 4])).unwrap();
        assert_eq!(z.exact_components().unwrap(), ints(&[0, 0]));
        let w = OneForm::new(Piece::P1, parse_form("x0^2 dx0", 1).unwrap());
        assert_eq!(
            value_at(&w, &ints(&[3]))
                .unwrap()
                .exact_components()
                .unwrap(),
            ints(&[9])
        );
    }

    #[test]
    fn axis_constraint_row() {
        let x = y_axis();
        let c = compatible_pair_constraints(&x, &pt(Piece::P2, &[0, 5])).unwrap();
        assert_eq!(c.to_rows(), vec![ints(&[0, 1, 0, -1])]);
        assert!(matches!(
            compatible_pair_constraints(&x, &pt(Piece::P1, &[1, 0])),
            Err(FibreError::NotOnLocus(_))
        ));
    }

    #[test]
    fn wedge_has_no_constraints() {
        let c = compatible_pair_constraints(&wedge(), &pt(Piece::P2, &[0, 0])).unwrap();
        assert_eq!((c.rows(), c.cols()), (0, 4));
    }

    #[test]
    fn identity_gluing_constraint() {
        let c = compatible_pair_constraints(&full_identification(1), &pt(Piece::P1, &[2])).unwrap();
        assert_eq!(c.to_rows(), vec![ints(&[1, -1])]);
    }

    #[test]
    fn three_fibre_cases() {
        let x = y_axis();
        let f = fibre_at(&x, &pt(Piece::P1, &[1, 0])).unwrap();
        assert_eq!((f.case, f.dim), (PointClass::Interior1, 2));
        let f = fibre_at(&x, &pt(Piece::P2, &[0, 5])).unwrap();
        assert_eq!((f.case, f.dim), (PointClass::GlueLocus, 3));
        let flat: Vec<Vec<BigRational>> = f
            .basis
            .iter()
            .map(|e| {
                e.flat()
                    .iter()
                    .map(|s| s.as_exact().unwrap().clone())
                    .collect()
            })
            .collect();
        assert_eq!(
            flat,
            vec![
                ints(&[1, 0, 0, 0]),
                ints(&[0, 0, 1, 0]),
                ints(&[0, 1, 0, 1])
            ]
        );
        let f = fibre_at(&wedge(), &pt(Piece::P1, &[0, 0])).unwrap();
        assert_eq!(f.dim, 4);
    }

    #[test]
    fn projections() {
        let x = y_axis();
        let y = pt(Piece::P2, &[0, 5]);
        let lifts = x.lift_point(&y).unwrap();
        let a1 = Covector::exact(lifts[0].clone(), ints(&[2, 3]));
        let a2 = Covector::exact(lifts[1].clone(), ints(&[-1, 3]));
        let e = rho_pair_inverse(&x, &a1, &a2).unwrap();
        assert_eq!(rho1(&e).unwrap(), a1);
        assert_eq!(rho2(&e).unwrap(), a2);
        let bad = Covector::exact(lifts[1].clone(), ints(&[-1, 4]));
        assert_eq!(
            rho_pair_inverse(&x, &a1, &bad),
            Err(FibreError::NotCompatible)
        );

        let v = Covector::exact(pt(Piece::P1, &[1, 0]), ints(&[1, 0]));
        let e = rho1_inverse(&x, &v).unwrap();
        assert_eq!(rho1(&e).unwrap(), v);
        assert!(matches!(rho2(&e), Err(FibreError::Domain { .. })));

        let w = Covector::exact(pt(Piece::P2, &[3, 1]), ints(&[1, 1]));
        let e = FibreElement::Interior(w);
        assert!(matches!(
            rho1(&e),
            Err(FibreError::Domain { map: "rho1", .. })
        ));
        assert!(matches!(
            rho1_inverse(&x, &Covector::zero(pt(Piece::P2, &[3, 1]))),
            Err(FibreError::Domain { .. })
        ));
        let z = Covector::zero(pt(Piece::P1, &[1, 0]));
        assert_eq!(rho1(&rho1_inverse(&x, &z).unwrap()).unwrap(), z);
    }

    #[test]
    fn vanishing_blocks() {
        let x = y_axis();
        let v = vanishing_constraints(&x, &pt(Piece::P1, &[1, 0])).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!((v[0].piece, v[0].dim), (Piece::P1, 2));
        let v = vanishing_constraints(&x, &pt(Piece::P1, &[0, 5])).unwrap();
        assert_eq!(
            v.iter().map(|c| c.piece).collect::<Vec<_>>(),
            vec![Piece::P1, Piece::P2]
        );
        let v = vanishing_constraints(&wedge(), &pt(Piece::P2, &[0, 0])).unwrap();
        assert_eq!(v.len(), 2);
    }

    #[test]
    fn oracle_matches_known_dimensions() {
        let x = y_axis();
        assert_eq!(fibre_oracle(&x, &pt(Piece::P2, &[0, 5]), 1).unwrap(), 3);
        assert_eq!(fibre_oracle(&x, &pt(Piece::P1, &[1, 0]), 1).unwrap(), 2);
        assert_eq!(
            fibre_oracle(&wedge(), &pt(Piece::P1, &[0, 0]), 1).unwrap(),
            4
        );
        assert_eq!(
            fibre_oracle(&x, &pt(Piece::P1, &[1, 0]), 0),
            Err(FibreError::BadDegree)
        );
    }

    #[test]
    fn forms_give_compatible_values() {
        let x = y_axis();
        let o = EqualityOracle::default();
        let fp = glue_forms(
            &x,
            OneForm::new(
                Piece::P1,
                parse_form("x1 dx0 + (x0 + x1^2) dx1", 2).unwrap(),
            ),
            OneForm::new(Piece::P2, parse_form("7 dx0 + x1^2 dx1", 2).unwrap()),
            &o,
        )
        .unwrap();
        for t in [-2, 0, 3] {
            let y = pt(Piece::P2, &[0, t]);
            let lifts = x.lift_point(&y).unwrap();
            let a1 = value_at(fp.w1(), &lifts[0].coords).unwrap();
            let a2 = value_at(fp.w2(), &lifts[1].coords).unwrap();
            assert!(is_compatible_pair(&x, &y, &a1, &a2, 0.0).unwrap());
        }
    }
}
