//! Fibres of Λ¹ over interior and glue-locus points, checked against the
//! definition-level oracle, and the ρ maps on a locus fibre.
//!
//!     cargo run --example fibre_decomposition

use gluedforms::fibre::{fibre_at, fibre_oracle, rho1, rho2, Covector};
use gluedforms::scalar::rat;
use gluedforms::space::fixtures::{wedge, y_axis};
use gluedforms::space::GluedPoint;

fn main() {
    let cases = [
        ("y-axis", y_axis(), GluedPoint::p1(vec![rat(1), rat(2)])),
        ("y-axis", y_axis(), GluedPoint::p2(vec![rat(0), rat(5)])),
        ("wedge", wedge(), GluedPoint::p2(vec![rat(3), rat(0)])),
        ("wedge", wedge(), GluedPoint::p1(vec![rat(0), rat(0)])),
    ];
    for (name, x, p) in &cases {
        let fib = fibre_at(x, p).unwrap();
        let oracle = fibre_oracle(x, p, 2).unwrap();
        println!(
            "{:7} {:12} {:?}: dim {} (oracle {})",
            name,
            p.to_string(),
            fib.case,
            fib.dim,
            oracle
        );
    }

    let x = y_axis();
    let fib = fibre_at(&x, &GluedPoint::p2(vec![rat(0), rat(5)])).unwrap();
    println!("\nbasis over {}:", fib.point);
    let show = |c: &Covector| {
        let parts: Vec<String> = c.components.iter().map(ToString::to_string).collect();
        format!("({})", parts.join(", "))
    };
    for e in &fib.basis {
        let a1 = rho1(e).unwrap();
        let a2 = rho2(e).unwrap();
        println!("  rho1 = {}  rho2 = {}", show(&a1), show(&a2));
    }
}
