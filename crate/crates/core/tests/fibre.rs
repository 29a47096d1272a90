mod common;

use common::*;
use gluedforms::fibre::*;
use gluedforms::scalar::{rat, Scalar};
use gluedforms::space::fixtures::*;
use gluedforms::space::{GluedPoint, GluedSpace, Piece, PointClass};
use num_rational::BigRational;

fn exact(e: &FibreElement) -> Vec<BigRational> {
    e.flat()
        .iter()
        .map(|s| s.as_exact().unwrap().clone())
        .collect()
}

#[test]
fn oracle_matches_fibre_on_skew_plane() {
    let x = skew_plane();
    let mut r = rng(31);
    let mut pts = vec![locus_point(&mut r, &x), locus_point(&mut r, &x)];
    pts.push(interior_point(&mut r, &x, Piece::P1).unwrap());
    for p in pts {
        let d = fibre_at(&x, &p).unwrap().dim;
        assert_eq!(fibre_oracle(&x, &p, 1).unwrap(), d);
        assert_eq!(fibre_oracle(&x, &p, 2).unwrap(), d);
    }
}

#[test]
fn skew_plane_fibre_dimensions() {
    let x = skew_plane();
    let on = fibre_at(&x, &GluedPoint::p1(vec![rat(1), rat(2), rat(0)])).unwrap();
    assert_eq!(on.case, PointClass::GlueLocus);
    assert_eq!(on.dim, 3);
    let off = fibre_at(&x, &GluedPoint::p1(vec![rat(1), rat(2), rat(3)])).unwrap();
    assert_eq!(off.dim, 3);
    assert_eq!(off.case, PointClass::Interior1);
}

#[test]
fn locus_basis_satisfies_constraints() {
    let mut r = rng(32);
    for x in [y_axis(), wedge(), full_identification(2), skew_plane()] {
        for _ in 0..5 {
            let y = locus_point(&mut r, &x);
            let fib = fibre_at(&x, &y).unwrap();
            let c = fib.constraints.clone().unwrap();
            let d = x.piece1().dim + x.piece2().dim;
            assert_eq!(fib.dim, d - c.rank());
            for e in &fib.basis {
                assert!(c.apply(&exact(e)).iter().all(|v| *v == rat(0)));
                let FibreElement::Glue(g) = e else {
                    panic!("interior element on the locus")
                };
                assert!(is_compatible_pair(&x, &fib.point, &g.a1, &g.a2, 1e-9).unwrap());
            }
            let basis: Vec<_> = fib.basis.iter().map(exact).collect();
            let m = gluedforms::linalg::RatMatrix::from_rows(basis, d);
            assert_eq!(m.rank(), fib.dim);
        }
    }
}

fn random_covector(r: &mut rand_chacha::ChaCha8Rng, base: GluedPoint) -> Covector {
    let n = base.coords.len();
    Covector::exact(base, point(r, n))
}

#[test]
fn rho_round_trips_on_interior_fibres() {
    let mut r = rng(33);
    let x = y_axis();
    for _ in 0..20 {
        let p = interior_point(&mut r, &x, Piece::P1).unwrap();
        let v = random_covector(&mut r, p);
        let e = rho1_inverse(&x, &v).unwrap();
        assert_eq!(rho1(&e).unwrap(), v);
        assert!(rho2(&e).is_err());

        let q = interior_point(&mut r, &x, Piece::P2).unwrap();
        let v = random_covector(&mut r, q);
        let e = rho2_inverse(&x, &v).unwrap();
        assert_eq!(rho2(&e).unwrap(), v);
        assert!(rho1(&e).is_err());
    }
}

fn random_locus_element(r: &mut rand_chacha::ChaCha8Rng, x: &GluedSpace) -> FibreElement {
    let y = locus_point(r, x);
    let fib = fibre_at(x, &y).unwrap();
    let basis: Vec<_> = fib.basis.iter().map(exact).collect();
    let d1 = x.piece1().dim;
    let mut v = combination(r, &basis, d1 + x.piece2().dim);
    let a2 = v.split_off(d1);
    let lifts = x.lift_point(&y).unwrap();
    FibreElement::Glue(GlueFibreElement {
        a1: Covector::exact(lifts[0].clone(), v),
        a2: Covector::exact(lifts[1].clone(), a2),
    })
}

#[test]
fn rho_pair_reconstructs_locus_elements() {
    let mut r = rng(34);
    for x in [y_axis(), wedge(), skew_plane()] {
        for _ in 0..10 {
            let e = random_locus_element(&mut r, &x);
            let back = rho_pair_inverse(&x, &rho1(&e).unwrap(), &rho2(&e).unwrap()).unwrap();
            assert_eq!(back, e);
        }
    }
}

#[test]
fn incompatible_pairs_are_rejected() {
    let x = y_axis();
    let y = GluedPoint::p2(vec![rat(0), rat(1)]);
    let a1 = Covector::exact(GluedPoint::p1(vec![rat(0), rat(1)]), vec![rat(0), rat(1)]);
    let a2 = Covector::exact(y.clone(), vec![rat(0), rat(2)]);
    assert!(matches!(
        rho_pair_inverse(&x, &a1, &a2),
        Err(FibreError::NotCompatible)
    ));
    let a2 = Covector::new(y, vec![Scalar::Float(5.0), Scalar::Float(1.0 + 1e-12)]);
    assert!(rho_pair_inverse(&x, &a1, &a2).is_ok());
}

#[test]
fn rho_inverses_reject_wrong_points() {
    let x = y_axis();
    let on = Covector::exact(GluedPoint::p1(vec![rat(0), rat(1)]), vec![rat(1), rat(0)]);
    assert!(matches!(
        rho1_inverse(&x, &on),
        Err(FibreError::Domain { .. })
    ));
    let on2 = Covector::exact(GluedPoint::p2(vec![rat(0), rat(1)]), vec![rat(1), rat(0)]);
    assert!(matches!(
        rho2_inverse(&x, &on2),
        Err(FibreError::Domain { .. })
    ));
}

#[test]
fn oracle_rejects_degree_zero() {
    let x = y_axis();
    let p = GluedPoint::p1(vec![rat(1), rat(1)]);
    assert!(matches!(
        fibre_oracle(&x, &p, 0),
        Err(FibreError::BadDegree)
    ));
}
