//! Pseudo-metrics on the cotangent fibres of the pieces and the glued
//! pseudo-metric `g^Λ`.
//!
//! On `i₁(X₁∖Y)` and `i₂(X₂∖f(Y))` the glued metric is the piece metric
//! read through `ρ̃₁`, `ρ̃₂`. Over the glue locus it is the average
//! `½(g₁(ρ̃₁·, ρ̃₁·) + g₂(ρ̃₂·, ρ̃₂·))`.
//!
//! Compatibility of `g₁` and `g₂` asks for `g₁(α₁, β₁) = g₂(α₂, β₂)` on
//! every pair of compatible pairs. It is checked on a basis of the fibre,
//! which suffices by bilinearity. With full-rank metrics this fails on
//! every proper positive-dimensional `Y` and on the wedge; the verdict is
//! reported as is and [`glue_metric`] proceeds regardless.

use std::collections::BTreeSet;

use num_rational::BigRational;
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::ser::SerializeStruct;
use serde::Serialize;
use thiserror::Error;

use crate::equal::{EqualityError, EqualityOracle, DEFAULT_TOLERANCE};
use crate::expr::Expr;
use crate::fibre::{fibre_at, is_compatible_pair, Covector, FibreElement, FibreError};
use crate::linalg::{scalar_rank, Matrix};
use crate::scalar::{ratio, serialize_rationals, EvalError, Mode, Scalar};
use crate::space::{GluedPoint, GluedSpace, Piece, PointClass};

/// Relative singular-value cutoff for numerical ranks.
pub const RANK_TOLERANCE: f64 = 1e-9;

/// Sample count used by [`glue_metric`] for its rank precondition.
pub const DEFAULT_METRIC_SAMPLES: usize = 8;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("metric matrix is {rows}x{cols}, expected {dim}x{dim}")]
    Shape {
        rows: usize,
        cols: usize,
        dim: usize,
    },
    #[error("metric entry ({i},{j}) differs from ({j},{i})")]
    NotSymmetric { i: usize, j: usize },
    #[error("metric entry uses x{index}, outside dimension {dim}")]
    VariableOutOfRange { index: usize, dim: usize },
    #[error("metric lives on {found}, expected {expected}")]
    WrongPiece { expected: Piece, found: Piece },
    #[error("metric on {piece} has rank {rank} < {dim} at {at:?}")]
    RankDeficient {
        piece: Piece,
        rank: usize,
        dim: usize,
        at: Vec<String>,
    },
    #[error("samples must be at least 1")]
    NoSamples,
    #[error("{0} is not an element of the fibre over {1}")]
    NotInFibre(&'static str, GluedPoint),
    #[error("evaluation failed: {0}")]
    Eval(#[from] EvalError),
    #[error(transparent)]
    Equality(#[from] EqualityError),
    #[error(transparent)]
    Fibre(#[from] FibreError),
}

impl From<crate::space::SpaceError> for MetricError {
    fn from(e: crate::space::SpaceError) -> Self {
        MetricError::Fibre(e.into())
    }
}

/// A symmetric matrix of expressions on one piece. Only the upper triangle
/// is stored.
#[derive(Clone, Debug, PartialEq)]
pub struct PieceMetric {
    piece: Piece,
    dim: usize,
    upper: Vec<Expr>,
}

fn upper_index(dim: usize, i: usize, j: usize) -> usize {
    let (i, j) = if i <= j { (i, j) } else { (j, i) };
    i * dim - i * (i + 1) / 2 + j
}

impl PieceMetric {
    /// From a full matrix; the lower triangle must agree with the upper.
    pub fn from_rows(
        piece: Piece,
        rows: Vec<Vec<Expr>>,
        oracle: &EqualityOracle,
    ) -> Result<Self, MetricError> {
        let dim = rows.len();
        for r in &rows {
            if r.len() != dim {
                return Err(MetricError::Shape {
                    rows: dim,
                    cols: r.len(),
                    dim,
                });
            }
        }
        for i in 0..dim {
            for j in i + 1..dim {
                if !oracle.equal(&rows[i][j], &rows[j][i], dim)?.equal {
                    return Err(MetricError::NotSymmetric { i, j });
                }
            }
        }
        let upper = (0..dim)
            .flat_map(|i| (i..dim).map(move |j| (i, j)))
            .map(|(i, j)| rows[i][j].clone())
            .collect();
        PieceMetric::from_upper(piece, dim, upper)
    }

    /// From the upper triangle, row by row.
    pub fn from_upper(piece: Piece, dim: usize, upper: Vec<Expr>) -> Result<Self, MetricError> {
        let n = dim * (dim + 1) / 2;
        if upper.len() != n {
            return Err(MetricError::Shape {
                rows: dim,
                cols: upper.len(),
                dim,
            });
        }
        for e in &upper {
            if e.var_bound() > dim {
                return Err(MetricError::VariableOutOfRange {
                    index: e.var_bound() - 1,
                    dim,
                });
            }
        }
        Ok(PieceMetric { piece, dim, upper })
    }

    pub fn identity(piece: Piece, dim: usize) -> Self {
        let upper = (0..dim)
            .flat_map(|i| (i..dim).map(move |j| if i == j { Expr::one() } else { Expr::zero() }))
            .collect();
        PieceMetric { piece, dim, upper }
    }

    pub fn piece(&self) -> Piece {
        self.piece
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn entry(&self, i: usize, j: usize) -> &Expr {
        &self.upper[upper_index(self.dim, i, j)]
    }

    /// Same matrix, moved to the other piece.
    pub fn on(&self, piece: Piece) -> Self {
        PieceMetric {
            piece,
            ..self.clone()
        }
    }

    pub fn matrix_at(&self, x: &[BigRational]) -> Result<Matrix<Scalar>, MetricError> {
        let values = self
            .upper
            .iter()
            .map(|e| e.eval_scalar(x))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Matrix::from_fn(self.dim, self.dim, |i, j| {
            values[upper_index(self.dim, i, j)].clone()
        }))
    }

    /// `uᵀ G(x) v`.
    pub fn pair(
        &self,
        x: &[BigRational],
        u: &[Scalar],
        v: &[Scalar],
    ) -> Result<Scalar, MetricError> {
        Ok(bilinear(&self.matrix_at(x)?, u, v))
    }
}

impl Serialize for PieceMetric {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> = (0..self.dim)
            .map(|i| {
                (0..self.dim)
                    .map(|j| self.entry(i, j).to_string())
                    .collect()
            })
            .collect();
        let mut st = s.serialize_struct("PieceMetric", 3)?;
        st.serialize_field("piece", &self.piece)?;
        st.serialize_field("dim", &self.dim)?;
        st.serialize_field("matrix", &rows)?;
        st.end()
    }
}

/// `uᵀ G v`, exact when everything is exact.
fn bilinear(g: &Matrix<Scalar>, u: &[Scalar], v: &[Scalar]) -> Scalar {
    let exact = |xs: &[Scalar]| -> Option<Vec<BigRational>> {
        xs.iter().map(|s| s.as_exact().cloned()).collect()
    };
    let ge: Option<Vec<BigRational>> = g
        .to_rows()
        .into_iter()
        .flatten()
        .map(|s| s.as_exact().cloned())
        .collect();
    if let (Some(ge), Some(ue), Some(ve)) = (ge, exact(u), exact(v)) {
        let n = v.len();
        let mut acc = BigRational::zero();
        for (i, ui) in ue.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in ve.iter().enumerate() {
                acc += ui * &ge[i * n + j] * vj;
            }
        }
        return Scalar::Exact(acc);
    }
    let mut acc = 0.0;
    for (i, ui) in u.iter().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            acc += ui.to_f64() * g.get(i, j).to_f64() * vj.to_f64();
        }
    }
    Scalar::Float(acc)
}

fn scalars_close(a: &Scalar, b: &Scalar, tol: f64) -> bool {
    match (a.as_exact(), b.as_exact()) {
        (Some(x), Some(y)) => x == y,
        _ => (a.to_f64() - b.to_f64()).abs() <= tol,
    }
}

/// The origin, then pseudo-random points with coordinates in
/// `{-2, -7/4, …, 2}`, without repeats. At most `n` points.
pub fn sample_points(dim: usize, n: usize, seed: u64) -> Vec<Vec<BigRational>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = BTreeSet::new();
    let mut out = Vec::with_capacity(n);
    let origin = vec![BigRational::zero(); dim];
    seen.insert(origin.clone());
    out.push(origin);
    let mut attempts = 0;
    while out.len() < n && attempts < 64 * n {
        attempts += 1;
        let p: Vec<BigRational> = (0..dim)
            .map(|_| ratio(rng.random_range(-8..=8), 4))
            .collect();
        if seen.insert(p.clone()) {
            out.push(p);
        }
    }
    out.truncate(n.max(1));
    out
}

/// Outcome of the rank check, with the first failing point if any.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RankCheck {
    pub full_rank: bool,
    pub mode: Mode,
    #[serde(serialize_with = "serialize_opt_point")]
    pub failing_point: Option<Vec<BigRational>>,
    pub rank_there: Option<usize>,
}

fn serialize_opt_point<S: serde::Serializer>(
    p: &Option<Vec<BigRational>>,
    s: S,
) -> Result<S::Ok, S::Error> {
    match p {
        Some(v) => serialize_rationals(v, s),
        None => s.serialize_none(),
    }
}

pub fn rank_check(g: &PieceMetric, samples: usize, seed: u64) -> Result<RankCheck, MetricError> {
    if samples == 0 {
        return Err(MetricError::NoSamples);
    }
    let mut mode = Mode::Exact;
    for x in sample_points(g.dim, samples, seed) {
        let (rank, m) = scalar_rank(&g.matrix_at(&x)?, RANK_TOLERANCE);
        mode = mode.and(m);
        if rank != g.dim {
            return Ok(RankCheck {
                full_rank: false,
                mode,
                failing_point: Some(x),
                rank_there: Some(rank),
            });
        }
    }
    Ok(RankCheck {
        full_rank: true,
        mode,
        failing_point: None,
        rank_there: None,
    })
}

/// Whether `g` has rank `d` at the origin and at `samples − 1` further
/// seeded points (seed 0).
pub fn check_metric_rank(g: &PieceMetric, samples: usize) -> Result<bool, MetricError> {
    Ok(rank_check(g, samples, 0)?.full_rank)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricMismatch {
    #[serde(serialize_with = "serialize_rationals")]
    pub parameter: Vec<BigRational>,
    pub i: usize,
    pub j: usize,
    pub g1_value: Scalar,
    pub g2_value: Scalar,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct MetricCompatibility {
    pub compatible: bool,
    pub mode: Mode,
    pub points_checked: usize,
    pub mismatch: Option<MetricMismatch>,
}

fn check_pieces(space: &GluedSpace, g1: &PieceMetric, g2: &PieceMetric) -> Result<(), MetricError> {
    for (g, piece) in [(g1, Piece::P1), (g2, Piece::P2)] {
        if g.piece != piece {
            return Err(MetricError::WrongPiece {
                expected: piece,
                found: g.piece,
            });
        }
        let d = space.piece_dim(piece);
        if g.dim != d {
            return Err(MetricError::Shape {
                rows: g.dim,
                cols: g.dim,
                dim: d,
            });
        }
    }
    Ok(())
}

/// Parameters of `Y` at which compatibility is tested: the origin, `±1` when
/// `Y` is a line, then seeded points up to `samples` in total.
pub fn locus_samples(k: usize, samples: usize, seed: u64) -> Vec<Vec<BigRational>> {
    if k != 1 {
        return sample_points(k, samples.max(1), seed);
    }
    let mut pts: Vec<Vec<BigRational>> = [0, -1, 1].iter().map(|&t| vec![ratio(t, 1)]).collect();
    let n = samples.max(3);
    for p in sample_points(1, n + 3, seed) {
        if pts.len() == n {
            break;
        }
        if !pts.contains(&p) {
            pts.push(p);
        }
    }
    pts
}

pub fn metrics_compatibility(
    space: &GluedSpace,
    g1: &PieceMetric,
    g2: &PieceMetric,
    samples: usize,
    seed: u64,
) -> Result<MetricCompatibility, MetricError> {
    check_pieces(space, g1, g2)?;
    let gl = space.gluing();
    let params = locus_samples(gl.dim(), samples, seed);
    let mut mode = Mode::Exact;
    for t in &params {
        let y = GluedPoint::p2(gl.apply_on_params(t));
        let fib = fibre_at(space, &y)?;
        let pairs: Vec<(&Covector, &Covector)> = fib
            .basis
            .iter()
            .filter_map(|e| match e {
                FibreElement::Glue(g) => Some((&g.a1, &g.a2)),
                FibreElement::Interior(_) => None,
            })
            .collect();
        let (l1, l2) = (&pairs_base(&fib.basis, 0), &pairs_base(&fib.basis, 1));
        let m1 = g1.matrix_at(l1)?;
        let m2 = g2.matrix_at(l2)?;
        for i in 0..pairs.len() {
            for j in i..pairs.len() {
                let a = bilinear(&m1, &pairs[i].0.components, &pairs[j].0.components);
                let b = bilinear(&m2, &pairs[i].1.components, &pairs[j].1.components);
                mode = mode.and(a.mode()).and(b.mode());
                if !scalars_close(&a, &b, DEFAULT_TOLERANCE) {
                    return Ok(MetricCompatibility {
                        compatible: false,
                        mode,
                        points_checked: params.len(),
                        mismatch: Some(MetricMismatch {
                            parameter: t.clone(),
                            i,
                            j,
                            g1_value: a,
                            g2_value: b,
                        }),
                    });
                }
            }
        }
    }
    Ok(MetricCompatibility {
        compatible: true,
        mode,
        points_checked: params.len(),
        mismatch: None,
    })
}

// Base point of side `side` of the first basis element; an empty fibre
// basis cannot occur on the locus of Euclidean pieces of positive total
// dimension, and for zero-dimensional pieces the coordinates are empty.
fn pairs_base(basis: &[FibreElement], side: usize) -> Vec<BigRational> {
    match basis.first() {
        Some(FibreElement::Glue(g)) if side == 0 => g.a1.base.coords.clone(),
        Some(FibreElement::Glue(g)) => g.a2.base.coords.clone(),
        _ => Vec::new(),
    }
}

/// `g₁(u_i, u_j) = g₂(v_i, v_j)` over a basis `{(u_i, v_i)}` of compatible
/// pairs at sampled points of `Y` (seed 0).
pub fn check_metrics_compatible(
    space: &GluedSpace,
    g1: &PieceMetric,
    g2: &PieceMetric,
    samples: usize,
) -> Result<bool, MetricError> {
    Ok(metrics_compatibility(space, g1, g2, samples, 0)?.compatible)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GluedMetric {
    pub g1: PieceMetric,
    pub g2: PieceMetric,
    pub compatible: bool,
    #[serde(skip)]
    space: GluedSpace,
}

impl GluedMetric {
    pub fn space(&self) -> &GluedSpace {
        &self.space
    }
}

/// Assemble `g^Λ`. Both piece metrics must pass the rank check; the
/// compatibility verdict is recorded but not required.
pub fn glue_metric(
    space: &GluedSpace,
    g1: PieceMetric,
    g2: PieceMetric,
) -> Result<GluedMetric, MetricError> {
    glue_metric_with(space, g1, g2, DEFAULT_METRIC_SAMPLES, 0)
}

pub fn glue_metric_with(
    space: &GluedSpace,
    g1: PieceMetric,
    g2: PieceMetric,
    samples: usize,
    seed: u64,
) -> Result<GluedMetric, MetricError> {
    check_pieces(space, &g1, &g2)?;
    for g in [&g1, &g2] {
        let rc = rank_check(g, samples, seed)?;
        if !rc.full_rank {
            return Err(MetricError::RankDeficient {
                piece: g.piece,
                rank: rc.rank_there.unwrap_or(0),
                dim: g.dim,
                at: rc
                    .failing_point
                    .unwrap_or_default()
                    .iter()
                    .map(ToString::to_string)
                    .collect(),
            });
        }
    }
    let compatible = metrics_compatibility(space, &g1, &g2, samples, seed)?.compatible;
    Ok(GluedMetric {
        g1,
        g2,
        compatible,
        space: space.clone(),
    })
}

/// Check that `e` lies in the fibre over `x`.
fn check_member(
    space: &GluedSpace,
    x: &GluedPoint,
    lifts: &[GluedPoint],
    e: &FibreElement,
    name: &'static str,
) -> Result<(), MetricError> {
    let ok = match e {
        FibreElement::Interior(c) => {
            lifts.len() == 1
                && c.base == lifts[0]
                && c.components.len() == space.piece_dim(c.piece())
        }
        FibreElement::Glue(g) => {
            lifts.len() == 2
                && g.a1.base == lifts[0]
                && g.a2.base == lifts[1]
                && is_compatible_pair(space, x, &g.a1, &g.a2, DEFAULT_TOLERANCE).unwrap_or(false)
        }
    };
    if ok {
        Ok(())
    } else {
        Err(MetricError::NotInFibre(name, x.clone()))
    }
}

/// `g^Λ(x)(e1, e2)`.
pub fn evaluate_metric(
    gm: &GluedMetric,
    x: &GluedPoint,
    e1: &FibreElement,
    e2: &FibreElement,
) -> Result<Scalar, MetricError> {
    let space = &gm.space;
    let lifts = space.lift_point(x)?;
    let xc = space.canonicalize(x)?;
    check_member(space, &xc, &lifts, e1, "first argument")?;
    check_member(space, &xc, &lifts, e2, "second argument")?;
    match (e1, e2) {
        (FibreElement::Interior(u), FibreElement::Interior(v)) => {
            let g = if u.piece() == Piece::P1 {
                &gm.g1
            } else {
                &gm.g2
            };
            g.pair(&u.base.coords, &u.components, &v.components)
        }
        (FibreElement::Glue(a), FibreElement::Glue(b)) => {
            let s1 = gm
                .g1
                .pair(&lifts[0].coords, &a.a1.components, &b.a1.components)?;
            let s2 = gm
                .g2
                .pair(&lifts[1].coords, &a.a2.components, &b.a2.components)?;
            half_sum(&s1, &s2)
        }
        _ => Err(MetricError::NotInFibre("argument pair", xc)),
    }
}

fn half_sum(a: &Scalar, b: &Scalar) -> Result<Scalar, MetricError> {
    let (a, b) = if a.mode() == b.mode() {
        (a.clone(), b.clone())
    } else {
        (a.to_float(), b.to_float())
    };
    Ok(a.add(&b)?.mul(&match a {
        Scalar::Exact(_) => Scalar::ratio(1, 2),
        Scalar::Float(_) => Scalar::Float(0.5),
    })?)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GramReport {
    pub point: GluedPoint,
    pub case: PointClass,
    pub fibre_dim: usize,
    pub rank: usize,
    pub mode: Mode,
    pub gram: Matrix<Scalar>,
}

/// Gram matrix of `g^Λ(x)` on the fibre basis, and its rank.
pub fn gram_at(gm: &GluedMetric, x: &GluedPoint) -> Result<GramReport, MetricError> {
    let fib = fibre_at(&gm.space, x)?;
    let n = fib.basis.len();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(evaluate_metric(
                gm,
                &fib.point,
                &fib.basis[i],
                &fib.basis[j],
            )?);
        }
    }
    let gram = Matrix::from_fn(n, n, |i, j| entries[i * n + j].clone());
    let (rank, mode) = scalar_rank(&gram, RANK_TOLERANCE);
    Ok(GramReport {
        point: fib.point,
        case: fib.case,
        fibre_dim: fib.dim,
        rank,
        mode,
        gram,
    })
}

pub fn gram_rank_at(gm: &GluedMetric, x: &GluedPoint) -> Result<usize, MetricError> {
    Ok(gram_at(gm, x)?.rank)
}
