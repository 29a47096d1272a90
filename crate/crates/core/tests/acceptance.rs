//! Acceptance run: one line per criterion, nonzero exit if any fails.

#[path = "common/mod.rs"]
mod common;

use std::collections::BTreeMap;
use std::panic::{self, AssertUnwindSafe};
use std::process::ExitCode;

use common::*;
use gluedforms::equal::EqualityOracle;
use gluedforms::expr::Expr;
use gluedforms::fibre::*;
use gluedforms::forms::*;
use gluedforms::metric::*;
use gluedforms::parse::parse_expr;
use gluedforms::poly::Poly;
use gluedforms::scalar::{rat, Mode};
use gluedforms::space::fixtures::*;
use gluedforms::space::{GluedPoint, GluedSpace, Piece};
use num_rational::BigRational;

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn oracle() -> EqualityOracle {
    EqualityOracle::default()
}

/// `p(0, t)` as a map from powers of `t` to coefficients.
fn on_axis(p: &Poly) -> BTreeMap<u32, BigRational> {
    let mut out = BTreeMap::new();
    for (m, c) in p.terms() {
        if m.exponent(0) == 0 {
            *out.entry(m.exponent(1)).or_insert_with(|| rat(0)) += c;
        }
    }
    out.retain(|_, c| *c != rat(0));
    out
}

fn ac1() -> Outcome {
    let x = y_axis();
    let mut r = rng(101);
    let (mut agree, mut yes) = (0, 0);
    for trial in 0..50 {
        let g1 = poly(&mut r, 2, 3, 4);
        let g2 = poly(&mut r, 2, 3, 4);
        let h1 = poly(&mut r, 2, 3, 4);
        let h2 = if trial % 2 == 0 {
            g2.add(&Poly::var(0).mul(&poly(&mut r, 2, 2, 3)))
        } else {
            poly(&mut r, 2, 3, 4)
        };
        let w1 = OneForm::new(Piece::P1, vec![g1.to_expr(), g2.to_expr()]);
        let w2 = OneForm::new(Piece::P2, vec![h1.to_expr(), h2.to_expr()]);
        let c = check_compatible(&x, &w1, &w2, &oracle()).map_err(|e| e.to_string())?;
        let expected = on_axis(&g2) == on_axis(&h2);
        ensure(c.mode == Mode::Exact, || {
            format!("trial {} decided by sampling", trial)
        })?;
        ensure(c.compatible == expected, || {
            format!("trial {}: got {}, oracle {}", trial, c.compatible, expected)
        })?;
        agree += 1;
        yes += expected as usize;
    }
    Ok(format!(
        "{}/50 agree ({} compatible, {} not)",
        agree,
        yes,
        50 - yes
    ))
}

fn dim_at(x: &GluedSpace, p: GluedPoint) -> Result<usize, String> {
    fibre_at(x, &p).map(|f| f.dim).map_err(|e| e.to_string())
}

fn ac2() -> Outcome {
    let p1 = |a, b| GluedPoint::p1(vec![rat(a), rat(b)]);
    let p2 = |a, b| GluedPoint::p2(vec![rat(a), rat(b)]);
    let y = y_axis();
    let w = wedge();
    let f = full_identification(1);
    let cases: Vec<(&str, &GluedSpace, GluedPoint, usize)> = vec![
        ("y-axis P1 interior", &y, p1(1, 2), 2),
        ("y-axis P2 interior", &y, p2(-3, 1), 2),
        ("y-axis locus", &y, p1(0, 4), 3),
        ("y-axis locus", &y, p2(0, -1), 3),
        ("wedge point", &w, p1(0, 0), 4),
        ("wedge point", &w, p2(0, 0), 4),
        ("wedge P1 interior", &w, p1(0, 1), 2),
        ("wedge P2 interior", &w, p2(2, 0), 2),
        ("R1 identification", &f, GluedPoint::p1(vec![rat(0)]), 1),
        ("R1 identification", &f, GluedPoint::p1(vec![rat(5)]), 1),
        ("R1 identification", &f, GluedPoint::p2(vec![rat(-7)]), 1),
    ];
    for (name, x, p, want) in &cases {
        let got = dim_at(x, p.clone())?;
        ensure(got == *want, || {
            format!("{} at {}: dim {} != {}", name, p, got, want)
        })?;
    }
    Ok(format!("{} points", cases.len()))
}

fn ac3() -> Outcome {
    let mut r = rng(103);
    let mut checked = 0;
    for (name, x) in [
        ("y-axis", y_axis()),
        ("wedge", wedge()),
        ("R1", full_identification(1)),
    ] {
        let mut pts = Vec::new();
        for tag in [Piece::P1, Piece::P2] {
            // full identification has no interior, so these land on the locus
            pts.push(match interior_point(&mut r, &x, tag) {
                Some(p) => p,
                None => GluedPoint::new(tag, point(&mut r, x.piece_dim(tag))),
            });
        }
        for _ in 0..3 {
            pts.push(locus_point(&mut r, &x));
        }
        for p in &pts {
            let want = dim_at(&x, p.clone())?;
            for d in 1..=3 {
                let got = fibre_oracle(&x, p, d).map_err(|e| e.to_string())?;
                ensure(got == want, || {
                    format!("{} at {} degree {}: oracle {} != {}", name, p, d, got, want)
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{} (point, degree) checks", checked))
}

fn forms_equal(a: &OneForm, b: &OneForm) -> Result<bool, String> {
    Ok(a.piece() == b.piece() && a.equals(b, &oracle()).map_err(|e| e.to_string())?.equal)
}

/// A compatible pair on the skew plane: an extension plus a term vanishing
/// on `z = 0`.
fn skew_compatible_pair(r: &mut rand_chacha::ChaCha8Rng, x: &GluedSpace) -> (OneForm, OneForm) {
    let pf = PulledForm::new(vec![poly_expr(r, 2, 2), poly_expr(r, 2, 2)]);
    let (e1, e2) = extend_form_from_y(x, &pf).unwrap();
    let z = Expr::var(2);
    let k = OneForm::new(
        Piece::P1,
        vec![
            Expr::mul(z.clone(), poly_expr(r, 3, 2)),
            Expr::mul(z, poly_expr(r, 3, 2)),
            poly_expr(r, 3, 2),
        ],
    );
    (add_forms(&e1, &k).unwrap(), e2)
}

fn ac4() -> Outcome {
    let y = y_axis();
    let mut r = rng(104);
    for trial in 0..20 {
        let (w1, w2) = axis_compatible_pair(&mut r, &y);
        let fp = glue_forms(&y, w1.clone(), w2.clone(), &oracle()).map_err(|e| e.to_string())?;
        let again = glue_forms(&y, fp.w1().clone(), fp.w2().clone(), &oracle())
            .map_err(|e| e.to_string())?;
        let (s1, s2) = split_glued_form(fp.clone());
        ensure(forms_equal(&s1, &w1)? && forms_equal(&s2, &w2)?, || {
            format!("split after glue differs, trial {}", trial)
        })?;
        ensure(again == fp, || {
            format!("glue after split differs, trial {}", trial)
        })?;
    }
    let s = skew_plane();
    for trial in 0..10 {
        let (x, (w1, w2)) = if trial % 2 == 0 {
            (&y, axis_compatible_pair(&mut r, &y))
        } else {
            (&s, skew_compatible_pair(&mut r, &s))
        };
        let fp = glue_forms(x, w1, w2, &oracle()).map_err(|e| e.to_string())?;
        let m = 1 + trial % 2;
        let params = poly_map(&mut r, m, x.gluing().dim(), 2);
        let (p1, p2) = x.locus_plot_lifts(&params).map_err(|e| e.to_string())?;
        ensure(
            x.f_equivalent(&p1, &p2, &oracle())
                .map_err(|e| e.to_string())?
                .equal,
            || format!("lifts of plot {} are not f-equivalent", trial),
        )?;
        let a = evaluate_on_plot(&fp, &p1).map_err(|e| e.to_string())?;
        let b = evaluate_on_plot(&fp, &p2).map_err(|e| e.to_string())?;
        let eq = a.equals(&b, &oracle()).map_err(|e| e.to_string())?;
        ensure(eq.equal && eq.mode == Mode::Exact, || {
            format!("plot {}: {} vs {}", trial, a, b)
        })?;
    }
    Ok("20 pair round trips, 10 locus plots".into())
}

fn ac5() -> Outcome {
    let y = y_axis();
    let mut r = rng(105);
    for trial in 0..50 {
        let (a1, a2) = axis_compatible_pair(&mut r, &y);
        let (b1, b2) = axis_compatible_pair(&mut r, &y);
        let k = small_rat(&mut r);
        let a = glue_forms(&y, a1, a2, &oracle()).map_err(|e| e.to_string())?;
        let b = glue_forms(&y, b1, b2, &oracle()).map_err(|e| e.to_string())?;
        let sum = a
            .add(&b, &y, &oracle())
            .map_err(|e| format!("trial {}: sum {}", trial, e))?;
        let scaled = a
            .scale(&k, &y, &oracle())
            .map_err(|e| format!("trial {}: scale {}", trial, e))?;
        ensure(
            sum.mode() == Mode::Exact && scaled.mode() == Mode::Exact,
            || format!("trial {} decided by sampling", trial),
        )?;
    }
    Ok("50 trials".into())
}

fn ac6() -> Outcome {
    let mut r = rng(106);
    let spaces = [y_axis(), skew_plane()];
    for trial in 0..20 {
        let x = &spaces[trial % 2];
        let k = x.gluing().dim();
        let pf = PulledForm::new((0..k).map(|_| poly_expr(&mut r, k, 3)).collect());
        let (w1, w2) = extend_form_from_y(x, &pf).map_err(|e| e.to_string())?;
        let back1 = restrict_to_y(x, &w1).map_err(|e| e.to_string())?;
        let back2 = pull_through_f(x, &w2).map_err(|e| e.to_string())?;
        for back in [back1, back2] {
            let eq = back.equals(&pf, &oracle()).map_err(|e| e.to_string())?;
            ensure(eq.equal && eq.mode == Mode::Exact, || {
                format!("trial {}: {} restricts to {}", trial, pf, back)
            })?;
        }
    }
    Ok("20 trials".into())
}

fn exact_flat(e: &FibreElement) -> Vec<BigRational> {
    e.flat()
        .iter()
        .map(|s| s.as_exact().unwrap().clone())
        .collect()
}

fn ac7() -> Outcome {
    let mut r = rng(107);
    let spaces = [y_axis(), wedge(), skew_plane()];
    let (mut interior, mut locus) = (0, 0);
    for trial in 0..50 {
        let x = &spaces[trial % 3];
        let err = |e: FibreError| format!("trial {}: {}", trial, e);
        if trial % 2 == 0 {
            let first = if trial % 4 == 0 { Piece::P1 } else { Piece::P2 };
            let other = if first == Piece::P1 {
                Piece::P2
            } else {
                Piece::P1
            };
            // the skew plane's second piece lies entirely in the locus
            let (tag, p) = match interior_point(&mut r, x, first) {
                Some(p) => (first, p),
                None => (
                    other,
                    interior_point(&mut r, x, other).ok_or("no interior point")?,
                ),
            };
            let n = p.coords.len();
            let v = Covector::exact(p, point(&mut r, n));
            let back = match tag {
                Piece::P1 => rho1(&rho1_inverse(x, &v).map_err(err)?),
                Piece::P2 => rho2(&rho2_inverse(x, &v).map_err(err)?),
            }
            .map_err(err)?;
            ensure(back == v, || {
                format!("trial {}: interior round trip", trial)
            })?;
            interior += 1;
        } else {
            let y = locus_point(&mut r, x);
            let fib = fibre_at(x, &y).map_err(err)?;
            let basis: Vec<_> = fib.basis.iter().map(exact_flat).collect();
            let d1 = x.piece1().dim;
            let mut v = combination(&mut r, &basis, d1 + x.piece2().dim);
            let a2 = v.split_off(d1);
            let lifts = x.lift_point(&y).map_err(|e| e.to_string())?;
            let e = FibreElement::Glue(GlueFibreElement {
                a1: Covector::exact(lifts[0].clone(), v),
                a2: Covector::exact(lifts[1].clone(), a2),
            });
            let back = rho_pair_inverse(x, &rho1(&e).map_err(err)?, &rho2(&e).map_err(err)?)
                .map_err(err)?;
            ensure(back == e, || {
                format!("trial {}: locus reconstruction", trial)
            })?;
            locus += 1;
        }
    }
    Ok(format!(
        "{} interior and {} locus elements",
        interior, locus
    ))
}

fn ac8() -> Outcome {
    let m = |e| MetricError::to_string(&e);
    let f = full_identification(1);
    let h = |piece| {
        PieceMetric::from_upper(piece, 1, vec![parse_expr("2 + x0^2", 1).unwrap()]).unwrap()
    };
    let gm = glue_metric(&f, h(Piece::P1), h(Piece::P2)).map_err(m)?;
    ensure(gm.compatible, || "R1 metrics judged incompatible".into())?;
    for t in sample_points(1, 10, 108) {
        let p = GluedPoint::p2(t);
        let rep = gram_at(&gm, &p).map_err(m)?;
        ensure(rep.rank == rep.fibre_dim, || {
            format!(
                "R1 at {}: rank {} != fibre dim {}",
                p, rep.rank, rep.fibre_dim
            )
        })?;
    }
    let mut verdicts = Vec::new();
    for (name, x, at, want) in [
        ("y-axis", y_axis(), GluedPoint::p2(vec![rat(0), rat(5)]), 3),
        ("wedge", wedge(), GluedPoint::p1(vec![rat(0), rat(0)]), 4),
    ] {
        let g1 = PieceMetric::identity(Piece::P1, 2);
        let g2 = PieceMetric::identity(Piece::P2, 2);
        let compatible =
            check_metrics_compatible(&x, &g1, &g2, DEFAULT_METRIC_SAMPLES).map_err(m)?;
        ensure(!compatible, || {
            format!("{}: identity metrics judged compatible", name)
        })?;
        let gm = glue_metric(&x, g1, g2).map_err(m)?;
        let rank = gram_rank_at(&gm, &at).map_err(m)?;
        ensure(rank == want, || {
            format!("{}: gram rank {} != {}", name, rank, want)
        })?;
        verdicts.push(format!("{} rank {}", name, rank));
    }
    Ok(format!(
        "R1 rank = fibre dim at 10 points; {}; both incompatible",
        verdicts.join(", ")
    ))
}

fn ac9() -> Outcome {
    let mut r = rng(109);
    for trial in 0..50 {
        let w = form(&mut r, Piece::P1, 2, 2);
        let m = poly_map(&mut r, 3, 2, 2);
        let n = poly_map(&mut r, 1, 3, 2);
        let mn = m.compose(&n).map_err(|e| e.to_string())?;
        let direct = pullback(&w, &mn).map_err(|e| e.to_string())?;
        let staged = pullback(&pullback(&w, &m).map_err(|e| e.to_string())?, &n)
            .map_err(|e| e.to_string())?;
        let eq = direct
            .equals(&staged, &oracle())
            .map_err(|e| e.to_string())?;
        ensure(eq.equal && eq.mode == Mode::Exact, || {
            format!("trial {}: functoriality", trial)
        })?;

        let u = point(&mut r, 1);
        let nu = n.eval(&u).map_err(|e| e.to_string())?;
        let lhs = mn.jacobian(&u).map_err(|e| e.to_string())?;
        let jm = m.jacobian(&nu).map_err(|e| e.to_string())?;
        let jn = n.jacobian(&u).map_err(|e| e.to_string())?;
        ensure(lhs == jm.mul(&jn), || {
            format!("trial {}: chain rule at {:?}", trial, u)
        })?;
    }
    Ok("50 triples".into())
}

fn ac10() -> Outcome {
    for (fixture, case, args) in GOLDEN_CASES {
        let a = run_cli(fixture, args);
        let b = run_cli(fixture, args);
        ensure(a.code == 0, || {
            format!("{}.{}: exit {}: {}", fixture, case, a.code, a.stderr)
        })?;
        ensure(a.stdout == b.stdout, || {
            format!("{}.{}: runs differ", fixture, case)
        })?;
        let want = std::fs::read_to_string(golden(fixture, case)).map_err(|e| e.to_string())?;
        ensure(a.stdout == want, || {
            format!("{}.{}: differs from golden file", fixture, case)
        })?;
    }
    Ok(format!("{} golden reports", GOLDEN_CASES.len()))
}

fn main() -> ExitCode {
    panic::set_hook(Box::new(|_| {}));
    let criteria: [(&str, &str, fn() -> Outcome); 10] = [
        (
            "AC1",
            "y-axis compatibility criterion vs substitution oracle",
            ac1,
        ),
        ("AC2", "fibre dimensions on the fixtures", ac2),
        (
            "AC3",
            "fibre_oracle agrees with fibre_at for degrees 1..3",
            ac3,
        ),
        (
            "AC4",
            "glue/split round trips and plot well-definedness",
            ac4,
        ),
        ("AC5", "compatible pairs closed under + and scaling", ac5),
        ("AC6", "extension witness restricts back", ac6),
        ("AC7", "rho bijections", ac7),
        ("AC8", "glued metric ranks and compatibility verdicts", ac8),
        ("AC9", "pullback functoriality and chain rule", ac9),
        ("AC10", "CLI golden reports are deterministic", ac10),
    ];
    let mut failed = 0;
    for (id, what, run) in criteria {
        let outcome = panic::catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|p| {
            let msg = p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {}", msg))
        });
        match outcome {
            Ok(detail) => println!("[PASS] {} {}: {}", id, what, detail),
            Err(why) => {
                failed += 1;
                println!("[FAIL] {} {}: {}", id, what, why);
            }
        }
    }
    println!("{} of 10 criteria passed", 10 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
