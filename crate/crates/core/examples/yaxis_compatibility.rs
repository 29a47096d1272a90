//! Two planes glued along their y-axes: a pair of forms is compatible
//! exactly when their dy coefficients agree on the axis.
//!
//!     cargo run --example yaxis_compatibility

use gluedforms::equal::EqualityOracle;
use gluedforms::forms::{check_compatible, evaluate_on_plot, glue_forms, OneForm};
use gluedforms::map::SmoothMap;
use gluedforms::parse::{parse_expr, parse_form};
use gluedforms::space::fixtures::y_axis;
use gluedforms::space::Piece;

fn form(piece: Piece, body: &str) -> OneForm {
    OneForm::new(piece, parse_form(body, 2).unwrap())
}

fn main() {
    let x = y_axis();
    let oracle = EqualityOracle::default();

    let w1 = form(Piece::P1, "x1 dx0 + (x0 + x1^2) dx1");
    let w2 = form(Piece::P2, "7 dx0 + x1^2 dx1");
    let w3 = form(Piece::P2, "x1 dx1");

    for (name, other) in [("w2", &w2), ("w3", &w3)] {
        let c = check_compatible(&x, &w1, other, &oracle).unwrap();
        println!(
            "w1 with {}: compatible = {}, difference on Y = {}",
            name, c.compatible, c.difference
        );
    }

    // the glued form takes the same value on both lifts of a plot of Y
    let glued = glue_forms(&x, w1, w2, &oracle).unwrap();
    let curve = SmoothMap::new(1, vec![parse_expr("x0^3 - x0", 1).unwrap()]).unwrap();
    let (p1, p2) = x.locus_plot_lifts(&curve).unwrap();
    println!("on the P1 lift: {}", evaluate_on_plot(&glued, &p1).unwrap());
    println!("on the P2 lift: {}", evaluate_on_plot(&glued, &p2).unwrap());
}
