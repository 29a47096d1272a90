//! Glued spaces `X₁ ∪_f X₂` for Euclidean pieces and an affine gluing
//! diffeomorphism `f : Y → f(Y)`.
//!
//! Points of `X₁ ∪_f X₂` are stored as tagged coordinates. The ranges of
//! `i₁` (on `X₁ ∖ Y`) and `i₂` (on all of `X₂`) partition the glued space, so
//! a point of `Y` is canonically represented by its image in piece 2.

use std::fmt;

use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;
use thiserror::Error;

use crate::equal::{Equality, EqualityError, EqualityOracle};
use crate::expr::Expr;
use crate::linalg::RatMatrix;
use crate::map::{MapError, SmoothMap};
use crate::poly::Poly;
use crate::scalar::Mode;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Piece {
    P1,
    P2,
}

impl fmt::Display for Piece {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Piece::P1 => "P1",
            Piece::P2 => "P2",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpaceError {
    #[error("{what} is not affine")]
    NonAffine { what: &'static str },
    #[error("{what}: expected dimension {expected}, found {found}")]
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    #[error("parametrization R^{k} -> R^{d} has rank {rank}, not injective")]
    NotInjective { k: usize, d: usize, rank: usize },
    #[error("left inverse does not invert the parametrization")]
    BadLeftInverse,
    #[error("gluing map does not land in its declared image")]
    ImageMismatch,
    #[error("inverse witness does not invert the gluing map")]
    BadInverse,
    #[error("{what} lives on {found}, expected {expected}")]
    WrongPiece {
        what: &'static str,
        expected: Piece,
        found: Piece,
    },
    #[error(transparent)]
    Map(#[from] MapError),
    #[error(transparent)]
    Equality(#[from] EqualityError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct EuclideanPiece {
    pub dim: usize,
}

impl EuclideanPiece {
    pub fn new(dim: usize) -> Self {
        EuclideanPiece { dim }
    }
}

/// Image of an injective affine map `R^k → R^d`, together with an affine
/// left inverse.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct AffineSubset {
    piece: Piece,
    param: SmoothMap,
    left_inverse: SmoothMap,
}

impl AffineSubset {
    /// Validates the parametrization; computes a left inverse when none is
    /// supplied.
    pub fn new(
        piece: Piece,
        param: SmoothMap,
        left_inverse: Option<SmoothMap>,
    ) -> Result<Self, SpaceError> {
        let (linear, offset) = param.affine_parts().ok_or(SpaceError::NonAffine {
            what: "parametrization",
        })?;
        let k = param.domain_dim();
        let d = param.codomain_dim();
        let rank = linear.rank();
        if rank != k {
            return Err(SpaceError::NotInjective { k, d, rank });
        }
        let left_inverse = match left_inverse {
            Some(l) => {
                if !l.is_affine() {
                    return Err(SpaceError::NonAffine {
                        what: "left inverse",
                    });
                }
                if l.domain_dim() != d || l.codomain_dim() != k {
                    return Err(SpaceError::DimensionMismatch {
                        what: "left inverse",
                        expected: d,
                        found: l.domain_dim(),
                    });
                }
                l
            }
            None => affine_left_inverse(&linear, &offset),
        };
        let round_trip = left_inverse.compose(&param)?;
        if !round_trip
            .equals(&SmoothMap::identity(k), &EqualityOracle::default())?
            .equal
        {
            return Err(SpaceError::BadLeftInverse);
        }
        Ok(AffineSubset {
            piece,
            param,
            left_inverse,
        })
    }

    pub fn piece(&self) -> Piece {
        self.piece
    }

    /// The same subset, viewed in the other piece.
    pub fn with_piece(self, piece: Piece) -> Self {
        AffineSubset { piece, ..self }
    }

    /// Dimension `k` of the subset.
    pub fn dim(&self) -> usize {
        self.param.domain_dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.param.codomain_dim()
    }

    pub fn param(&self) -> &SmoothMap {
        &self.param
    }

    pub fn left_inverse(&self) -> &SmoothMap {
        &self.left_inverse
    }

    pub fn point_at(&self, t: &[BigRational]) -> Vec<BigRational> {
        self.param.eval(t).expect("affine map evaluates exactly")
    }

    /// Parameter of `x` if `x` lies in the subset, by the exact test
    /// `param(left_inverse(x)) = x`.
    pub fn parameter_of(&self, x: &[BigRational]) -> Option<Vec<BigRational>> {
        if x.len() != self.ambient_dim() {
            return None;
        }
        let t = self.left_inverse.eval(x).ok()?;
        (self.point_at(&t) == x).then_some(t)
    }

    pub fn contains(&self, x: &[BigRational]) -> bool {
        self.parameter_of(x).is_some()
    }
}

// For u ↦ A u + c with rank A = k: pick k independent rows R and return
// x ↦ A_R⁻¹ (x_R − c_R).
fn affine_left_inverse(linear: &RatMatrix, offset: &[BigRational]) -> SmoothMap {
    let d = linear.rows();
    let k = linear.cols();
    let rows = linear.transpose().pivot_columns();
    let square = RatMatrix::from_fn(k, k, |i, j| linear.get(rows[i], j).clone());
    let inv = square.inverse().expect("pivot rows are independent");
    let components = (0..k)
        .map(|i| {
            let mut p = Poly::zero();
            for (j, &r) in rows.iter().enumerate() {
                let shifted = Poly::var(r).sub(&Poly::constant(offset[r].clone()));
                p = p.add(&shifted.scale(inv.get(i, j)));
            }
            p.to_expr()
        })
        .collect();
    SmoothMap::new(d, components).expect("affine components are polynomial")
}

/// The gluing diffeomorphism `f : Y → f(Y)`, expressed on the parameter
/// space `R^k` of `Y`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluingMap {
    domain: AffineSubset,
    map_on_params: SmoothMap,
    image: AffineSubset,
    inverse_on_params: SmoothMap,
}

impl GluingMap {
    pub fn new(
        domain: AffineSubset,
        map_on_params: SmoothMap,
        image: AffineSubset,
        inverse_on_params: Option<SmoothMap>,
    ) -> Result<Self, SpaceError> {
        let k = domain.dim();
        if domain.piece() != Piece::P1 {
            return Err(SpaceError::WrongPiece {
                what: "gluing domain",
                expected: Piece::P1,
                found: domain.piece(),
            });
        }
        if image.piece() != Piece::P2 {
            return Err(SpaceError::WrongPiece {
                what: "gluing image",
                expected: Piece::P2,
                found: image.piece(),
            });
        }
        if !map_on_params.is_affine() {
            return Err(SpaceError::NonAffine { what: "gluing map" });
        }
        if map_on_params.domain_dim() != k {
            return Err(SpaceError::DimensionMismatch {
                what: "gluing map domain",
                expected: k,
                found: map_on_params.domain_dim(),
            });
        }
        if map_on_params.codomain_dim() != image.ambient_dim() {
            return Err(SpaceError::DimensionMismatch {
                what: "gluing map codomain",
                expected: image.ambient_dim(),
                found: map_on_params.codomain_dim(),
            });
        }
        if image.dim() != k {
            return Err(SpaceError::DimensionMismatch {
                what: "image subset",
                expected: k,
                found: image.dim(),
            });
        }
        let oracle = EqualityOracle::default();
        // map lands in f(Y): map = param ∘ (left_inverse ∘ map)
        let to_image_params = image.left_inverse().compose(&map_on_params)?;
        let through_image = image.param().compose(&to_image_params)?;
        if !map_on_params.equals(&through_image, &oracle)?.equal {
            return Err(SpaceError::ImageMismatch);
        }
        let inverse_on_params = match inverse_on_params {
            Some(inv) => {
                if !inv.is_affine() {
                    return Err(SpaceError::NonAffine {
                        what: "inverse witness",
                    });
                }
                if inv.domain_dim() != k || inv.codomain_dim() != k {
                    return Err(SpaceError::DimensionMismatch {
                        what: "inverse witness",
                        expected: k,
                        found: inv.domain_dim(),
                    });
                }
                inv
            }
            None => {
                let (a, c) = to_image_params.affine_parts().expect("affine");
                let inv = a.inverse().ok_or(SpaceError::BadInverse)?;
                let comps = (0..k)
                    .map(|i| {
                        let mut p = Poly::zero();
                        for j in 0..k {
                            let shifted = Poly::var(j).sub(&Poly::constant(c[j].clone()));
                            p = p.add(&shifted.scale(inv.get(i, j)));
                        }
                        p.to_expr()
                    })
                    .collect();
                SmoothMap::new(k, comps)?
            }
        };
        let round_trip = inverse_on_params.compose(&to_image_params)?;
        if !round_trip.equals(&SmoothMap::identity(k), &oracle)?.equal {
            return Err(SpaceError::BadInverse);
        }
        Ok(GluingMap {
            domain,
            map_on_params,
            image,
            inverse_on_params,
        })
    }

    pub fn domain(&self) -> &AffineSubset {
        &self.domain
    }

    pub fn image(&self) -> &AffineSubset {
        &self.image
    }

    pub fn map_on_params(&self) -> &SmoothMap {
        &self.map_on_params
    }

    pub fn inverse_on_params(&self) -> &SmoothMap {
        &self.inverse_on_params
    }

    /// Dimension `k` of `Y`.
    pub fn dim(&self) -> usize {
        self.domain.dim()
    }

    /// `f(param(t))` in piece-2 coordinates.
    pub fn apply_on_params(&self, t: &[BigRational]) -> Vec<BigRational> {
        self.map_on_params
            .eval(t)
            .expect("affine map evaluates exactly")
    }

    /// Parameter `t` with `f(param(t)) = z`, if `z ∈ f(Y)`.
    pub fn preimage_parameter(&self, z: &[BigRational]) -> Option<Vec<BigRational>> {
        let s = self.image.parameter_of(z)?;
        Some(
            self.inverse_on_params
                .eval(&s)
                .expect("affine map evaluates exactly"),
        )
    }

    /// `f` as a map on piece-1 coordinates, `f ∘ left_inverse`.
    pub fn as_piece_map(&self) -> SmoothMap {
        self.map_on_params
            .compose(self.domain.left_inverse())
            .expect("dimensions checked at construction")
    }

    /// `f⁻¹` on piece-2 coordinates: `param ∘ inverse ∘ image.left_inverse`.
    pub fn inverse_piece_map(&self) -> SmoothMap {
        let s = self
            .inverse_on_params
            .compose(self.image.left_inverse())
            .expect("dimensions checked at construction");
        self.domain
            .param()
            .compose(&s)
            .expect("dimensions checked at construction")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct AssumptionFlags {
    /// The two pushforward diffeologies on Ω¹(Y) coincide.
    pub d_omega_equal: bool,
    /// i*(Ω¹(X₁)) = (f*j*)(Ω¹(X₂)).
    pub pullback_images_equal: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluedSpace {
    piece1: EuclideanPiece,
    piece2: EuclideanPiece,
    gluing: GluingMap,
    assumption_flags: AssumptionFlags,
}

/// Glue `p1` to `p2` along `gluing`.
pub fn make_glued_space(
    p1: EuclideanPiece,
    p2: EuclideanPiece,
    gluing: GluingMap,
) -> Result<GluedSpace, SpaceError> {
    if gluing.domain.ambient_dim() != p1.dim {
        return Err(SpaceError::DimensionMismatch {
            what: "gluing domain ambient space",
            expected: p1.dim,
            found: gluing.domain.ambient_dim(),
        });
    }
    if gluing.image.ambient_dim() != p2.dim {
        return Err(SpaceError::DimensionMismatch {
            what: "gluing image ambient space",
            expected: p2.dim,
            found: gluing.image.ambient_dim(),
        });
    }
    // Both conditions hold for affine subsets of Euclidean pieces glued by an
    // affine diffeomorphism; the extension witness in `forms` exhibits the
    // second one constructively.
    Ok(GluedSpace {
        piece1: p1,
        piece2: p2,
        gluing,
        assumption_flags: AssumptionFlags {
            d_omega_equal: true,
            pullback_images_equal: true,
        },
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
pub enum PointClass {
    Interior1,
    Interior2,
    GlueLocus,
}

impl fmt::Display for PointClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PointClass::Interior1 => "Interior1",
            PointClass::Interior2 => "Interior2",
            PointClass::GlueLocus => "GlueLocus",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GluedPoint {
    pub tag: Piece,
    #[serde(serialize_with = "crate::scalar::serialize_rationals")]
    pub coords: Vec<BigRational>,
}

impl GluedPoint {
    pub fn new(tag: Piece, coords: Vec<BigRational>) -> Self {
        GluedPoint { tag, coords }
    }

    pub fn p1(coords: Vec<BigRational>) -> Self {
        GluedPoint::new(Piece::P1, coords)
    }

    pub fn p2(coords: Vec<BigRational>) -> Self {
        GluedPoint::new(Piece::P2, coords)
    }
}

impl fmt::Display for GluedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:(", self.tag)?;
        for (i, c) in self.coords.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{}", c)?;
        }
        f.write_str(")")
    }
}

/// A plot of the glued space with connected domain, given by its lift to
/// one of the pieces.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Plot {
    lift_tag: Piece,
    lift_map: SmoothMap,
}

impl Plot {
    pub fn new(lift_tag: Piece, lift_map: SmoothMap) -> Self {
        Plot { lift_tag, lift_map }
    }

    pub fn domain_dim(&self) -> usize {
        self.lift_map.domain_dim()
    }

    pub fn lift_tag(&self) -> Piece {
        self.lift_tag
    }

    pub fn lift_map(&self) -> &SmoothMap {
        &self.lift_map
    }

    /// Constant plot `R^m → {x}`.
    pub fn constant(domain_dim: usize, at: &GluedPoint) -> Self {
        let comps = at
            .coords
            .iter()
            .map(|c| Expr::rational(c.clone()))
            .collect();
        Plot::new(
            at.tag,
            SmoothMap::new(domain_dim, comps).expect("constants are polynomial"),
        )
    }
}

impl GluedSpace {
    pub fn piece1(&self) -> EuclideanPiece {
        self.piece1
    }

    pub fn piece2(&self) -> EuclideanPiece {
        self.piece2
    }

    pub fn piece_dim(&self, piece: Piece) -> usize {
        match piece {
            Piece::P1 => self.piece1.dim,
            Piece::P2 => self.piece2.dim,
        }
    }

    pub fn gluing(&self) -> &GluingMap {
        &self.gluing
    }

    pub fn assumption_flags(&self) -> AssumptionFlags {
        self.assumption_flags
    }

    fn check_point(&self, x: &GluedPoint) -> Result<(), SpaceError> {
        let d = self.piece_dim(x.tag);
        if x.coords.len() != d {
            return Err(SpaceError::DimensionMismatch {
                what: "point coordinates",
                expected: d,
                found: x.coords.len(),
            });
        }
        Ok(())
    }

    /// Points of `Y` move to piece 2 via `f`; everything else is unchanged.
    pub fn canonicalize(&self, x: &GluedPoint) -> Result<GluedPoint, SpaceError> {
        self.check_point(x)?;
        if x.tag == Piece::P1 {
            if let Some(t) = self.gluing.domain.parameter_of(&x.coords) {
                return Ok(GluedPoint::p2(self.gluing.apply_on_params(&t)));
            }
        }
        Ok(x.clone())
    }

    pub fn classify_point(&self, x: &GluedPoint) -> Result<PointClass, SpaceError> {
        let c = self.canonicalize(x)?;
        Ok(match c.tag {
            Piece::P1 => PointClass::Interior1,
            Piece::P2 if self.gluing.image.contains(&c.coords) => PointClass::GlueLocus,
            Piece::P2 => PointClass::Interior2,
        })
    }

    /// Parameter `t ∈ R^k` of a glue-locus point.
    pub fn locus_parameter(&self, x: &GluedPoint) -> Result<Option<Vec<BigRational>>, SpaceError> {
        let c = self.canonicalize(x)?;
        Ok(match c.tag {
            Piece::P1 => None,
            Piece::P2 => self.gluing.preimage_parameter(&c.coords),
        })
    }

    /// All `x̃` with `π(x̃) = x`: two on the glue locus (P1 first), one
    /// elsewhere.
    pub fn lift_point(&self, x: &GluedPoint) -> Result<Vec<GluedPoint>, SpaceError> {
        let c = self.canonicalize(x)?;
        if c.tag == Piece::P2 {
            if let Some(t) = self.gluing.preimage_parameter(&c.coords) {
                let p1 = GluedPoint::p1(self.gluing.domain.point_at(&t));
                return Ok(vec![p1, c]);
            }
        }
        Ok(vec![c])
    }

    /// Whether `p` and `q` present the same plot of the glued space.
    pub fn f_equivalent(
        &self,
        p: &Plot,
        q: &Plot,
        oracle: &EqualityOracle,
    ) -> Result<Equality, SpaceError> {
        let m = p.domain_dim();
        if m != q.domain_dim() {
            return Ok(Equality {
                equal: false,
                mode: Mode::Exact,
            });
        }
        if p.lift_tag == q.lift_tag {
            return Ok(p.lift_map.equals(&q.lift_map, oracle)?);
        }
        let (p1, p2) = if p.lift_tag == Piece::P1 {
            (p, q)
        } else {
            (q, p)
        };
        let y = &self.gluing.domain;
        let fy = &self.gluing.image;
        // p1 factors through Y, p2 through f(Y)
        let t1 = y.left_inverse().compose(&p1.lift_map)?;
        let in_y = y.param().compose(&t1)?.equals(&p1.lift_map, oracle)?;
        if !in_y.equal {
            return Ok(in_y);
        }
        let s2 = fy.left_inverse().compose(&p2.lift_map)?;
        let in_fy = fy.param().compose(&s2)?.equals(&p2.lift_map, oracle)?;
        if !in_fy.equal {
            return Ok(Equality {
                equal: false,
                mode: in_y.mode.and(in_fy.mode),
            });
        }
        let pushed = self.gluing.map_on_params.compose(&t1)?;
        let agree = pushed.equals(&p2.lift_map, oracle)?;
        Ok(Equality {
            equal: agree.equal,
            mode: in_y.mode.and(in_fy.mode).and(agree.mode),
        })
    }

    /// Lift of a plot of `Y` given on the parameter space `R^k`, in both
    /// pieces.
    pub fn locus_plot_lifts(&self, in_params: &SmoothMap) -> Result<(Plot, Plot), SpaceError> {
        let p1 = self.gluing.domain.param().compose(in_params)?;
        let p2 = self.gluing.map_on_params.compose(in_params)?;
        Ok((Plot::new(Piece::P1, p1), Plot::new(Piece::P2, p2)))
    }
}

/// True when every coordinate is zero.
pub fn is_origin(x: &[BigRational]) -> bool {
    x.iter().all(Zero::is_zero)
}

/// Fixture spaces used throughout the tests, examples and golden files.
pub mod fixtures {
    use super::*;
    use crate::parse::parse_expr;

    fn map(dim: usize, comps: &[&str]) -> SmoothMap {
        SmoothMap::new(
            dim,
            comps.iter().map(|c| parse_expr(c, dim).unwrap()).collect(),
        )
        .unwrap()
    }

    /// Two copies of R² glued along the identity of their y-axes.
    pub fn y_axis() -> GluedSpace {
        let axis = |piece| AffineSubset::new(piece, map(1, &["0", "x0"]), None).unwrap();
        let gluing =
            GluingMap::new(axis(Piece::P1), map(1, &["0", "x0"]), axis(Piece::P2), None).unwrap();
        make_glued_space(EuclideanPiece::new(2), EuclideanPiece::new(2), gluing).unwrap()
    }

    /// Two copies of R² glued at their origins.
    pub fn wedge() -> GluedSpace {
        let origin = |piece| AffineSubset::new(piece, map(0, &["0", "0"]), None).unwrap();
        let gluing = GluingMap::new(
            origin(Piece::P1),
            map(0, &["0", "0"]),
            origin(Piece::P2),
            None,
        )
        .unwrap();
        make_glued_space(EuclideanPiece::new(2), EuclideanPiece::new(2), gluing).unwrap()
    }

    /// R^n glued to R^n along the identity of the whole space.
    pub fn full_identification(n: usize) -> GluedSpace {
        let comps: Vec<String> = (0..n).map(|i| format!("x{}", i)).collect();
        let comps: Vec<&str> = comps.iter().map(String::as_str).collect();
        let whole = |piece| AffineSubset::new(piece, map(n, &comps), None).unwrap();
        let gluing =
            GluingMap::new(whole(Piece::P1), map(n, &comps), whole(Piece::P2), None).unwrap();
        make_glued_space(EuclideanPiece::new(n), EuclideanPiece::new(n), gluing).unwrap()
    }

    /// R³ glued to R² along the plane {z = 0} by a shear-and-shift
    /// `(s, t) ↦ (s + t + 1, t − 2)`.
    pub fn skew_plane() -> GluedSpace {
        let plane = AffineSubset::new(Piece::P1, map(2, &["x0", "x1", "0"]), None).unwrap();
        let whole = AffineSubset::new(Piece::P2, map(2, &["x0", "x1"]), None).unwrap();
        let gluing =
            GluingMap::new(plane, map(2, &["x0 + x1 + 1", "x1 - 2"]), whole, None).unwrap();
        make_glued_space(EuclideanPiece::new(3), EuclideanPiece::new(2), gluing).unwrap()
    }
}
