//! Shared helpers for the integration tests: seeded generators and the
//! golden-file cases.
#![allow(dead_code)]

use std::path::PathBuf;
use std::process::Command;

use gluedforms::expr::Expr;
use gluedforms::forms::OneForm;
use gluedforms::map::SmoothMap;
use gluedforms::poly::{Monomial, Poly};
use gluedforms::scalar::ratio;
use gluedforms::space::Piece;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn small_rat(rng: &mut ChaCha8Rng) -> BigRational {
    ratio(rng.random_range(-5..=5), rng.random_range(1..=3))
}

pub fn nonzero_rat(rng: &mut ChaCha8Rng) -> BigRational {
    loop {
        let r = small_rat(rng);
        if r != BigRational::from_integer(0.into()) {
            return r;
        }
    }
}

pub fn point(rng: &mut ChaCha8Rng, dim: usize) -> Vec<BigRational> {
    (0..dim).map(|_| small_rat(rng)).collect()
}

/// Up to `terms` random monomials of degree `≤ degree` with small rational
/// coefficients.
pub fn poly(rng: &mut ChaCha8Rng, vars: usize, degree: u32, terms: usize) -> Poly {
    let monos = Monomial::up_to_degree(vars, degree);
    let mut p = Poly::zero();
    for _ in 0..terms {
        let m = monos[rng.random_range(0..monos.len())].clone();
        p = p.add(&Poly::term(m, small_rat(rng)));
    }
    p
}

pub fn poly_expr(rng: &mut ChaCha8Rng, vars: usize, degree: u32) -> Expr {
    poly(rng, vars, degree, 3).to_expr()
}

pub fn form(rng: &mut ChaCha8Rng, piece: Piece, dim: usize, degree: u32) -> OneForm {
    OneForm::new(
        piece,
        (0..dim).map(|_| poly_expr(rng, dim, degree)).collect(),
    )
}

pub fn poly_map(rng: &mut ChaCha8Rng, from: usize, to: usize, degree: u32) -> SmoothMap {
    SmoothMap::new(
        from,
        (0..to).map(|_| poly_expr(rng, from, degree)).collect(),
    )
    .unwrap()
}

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(format!("{}.scene", name))
}

pub fn golden(fixture: &str, case: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(format!("{}.{}.json", fixture, case))
}

/// `(fixture, case, command and arguments)`.
pub const GOLDEN_CASES: &[(&str, &str, &[&str])] = &[
    ("yaxis", "check_compat", &["check-compat", "GX", "w1", "w2"]),
    (
        "yaxis",
        "check_incompat",
        &["check-compat", "GX", "w1", "w3"],
    ),
    ("yaxis", "glue_form", &["glue-form", "GX", "w1", "w2"]),
    (
        "yaxis",
        "eval_form",
        &["eval-form", "GX", "w1", "w2", "at", "P2:(0,-3/4)"],
    ),
    ("yaxis", "fibre_locus", &["fibre", "GX", "at", "P2:(0,5)"]),
    (
        "yaxis",
        "fibre_interior",
        &["fibre", "GX", "at", "P1:(1,0)"],
    ),
    (
        "yaxis",
        "oracle",
        &["oracle", "GX", "at", "P2:(0,5)", "degree", "2"],
    ),
    ("yaxis", "rho", &["rho", "GX", "at", "P2:(0,5)"]),
    (
        "yaxis",
        "metric_compat",
        &["check-metric-compat", "GX", "g1", "g2"],
    ),
    ("yaxis", "glue_metric", &["glue-metric", "GX", "g1", "g2"]),
    (
        "yaxis",
        "gram_rank",
        &["gram-rank", "GX", "g1", "g2", "at", "P2:(0,5)"],
    ),
    (
        "wedge",
        "fibre_wedge_point",
        &["fibre", "W", "at", "P1:(0,0)"],
    ),
    ("wedge", "fibre_interior", &["fibre", "W", "at", "P2:(1,1)"]),
    ("wedge", "oracle", &["oracle", "W", "at", "P1:(0,0)"]),
    (
        "wedge",
        "eval_form",
        &["eval-form", "W", "w1", "w2", "at", "P1:(0,0)"],
    ),
    (
        "wedge",
        "metric_compat",
        &["check-metric-compat", "W", "g1", "g2"],
    ),
    (
        "wedge",
        "gram_rank",
        &["gram-rank", "W", "g1", "g2", "at", "P1:(0,0)"],
    ),
    (
        "full_identification",
        "check_compat",
        &["check-compat", "G", "u1", "u2"],
    ),
    (
        "full_identification",
        "fibre",
        &["fibre", "G", "at", "P1:(3)"],
    ),
    (
        "full_identification",
        "oracle",
        &["oracle", "G", "at", "P2:(-2)", "degree", "3"],
    ),
    (
        "full_identification",
        "rho",
        &["rho", "G", "at", "P1:(1/2)"],
    ),
    (
        "full_identification",
        "metric_compat",
        &["check-metric-compat", "G", "h1", "h2"],
    ),
    (
        "full_identification",
        "gram_rank",
        &["gram-rank", "G", "h1", "h2", "at", "P1:(1/2)"],
    ),
];

pub struct Output {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

/// Run the command-line tool on a fixture scene with `--seed 0`.
pub fn run_cli(fixture_name: &str, args: &[&str]) -> Output {
    let out = Command::new(env!("CARGO_BIN_EXE_gluedforms"))
        .arg(fixture(fixture_name))
        .args(args)
        .args(["--seed", "0"])
        .output()
        .expect("binary runs");
    Output {
        stdout: String::from_utf8(out.stdout).unwrap(),
        stderr: String::from_utf8(out.stderr).unwrap(),
        code: out.status.code().unwrap_or(-1),
    }
}

/// A point of `Y` given by a random parameter, tagged in piece 1.
pub fn locus_point(
    rng: &mut ChaCha8Rng,
    space: &gluedforms::space::GluedSpace,
) -> gluedforms::space::GluedPoint {
    let g = space.gluing();
    let t = point(rng, g.dim());
    gluedforms::space::GluedPoint::p1(g.domain().point_at(&t))
}

/// A random point of piece `tag` off the glue locus.
pub fn interior_point(
    rng: &mut ChaCha8Rng,
    space: &gluedforms::space::GluedSpace,
    tag: Piece,
) -> Option<gluedforms::space::GluedPoint> {
    use gluedforms::space::{GluedPoint, PointClass};
    for _ in 0..100 {
        let p = GluedPoint::new(tag, point(rng, space.piece_dim(tag)));
        if space.classify_point(&p).ok()? != PointClass::GlueLocus {
            return Some(p);
        }
    }
    None
}

/// A random rational combination of the vectors in `basis`.
pub fn combination(
    rng: &mut ChaCha8Rng,
    basis: &[Vec<BigRational>],
    len: usize,
) -> Vec<BigRational> {
    let mut out = vec![BigRational::from_integer(0.into()); len];
    for b in basis {
        let c = small_rat(rng);
        for (o, x) in out.iter_mut().zip(b) {
            *o += &c * x;
        }
    }
    out
}

/// A random compatible pair on a glued space whose `Y` is the y-axis of the
/// first piece and `f(Y)` the y-axis of the second: an extension of a random
/// form on the axis plus terms `a dx0 + x0 b dx1` that restrict to zero.
pub fn axis_compatible_pair(
    rng: &mut ChaCha8Rng,
    space: &gluedforms::space::GluedSpace,
) -> (OneForm, OneForm) {
    use gluedforms::forms::{add_forms, extend_form_from_y, PulledForm};
    let pf = PulledForm::new(vec![poly_expr(rng, 1, 3)]);
    let (e1, e2) = extend_form_from_y(space, &pf).unwrap();
    let mut kernel = |piece| {
        let a = poly_expr(rng, 2, 2);
        let b = poly_expr(rng, 2, 2);
        OneForm::new(piece, vec![a, Expr::mul(Expr::var(0), b)])
    };
    (
        add_forms(&e1, &kernel(Piece::P1)).unwrap(),
        add_forms(&e2, &kernel(Piece::P2)).unwrap(),
    )
}
