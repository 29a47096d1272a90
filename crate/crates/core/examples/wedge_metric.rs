//! The glued pseudo-metric on the wedge of two planes and on R glued to
//! itself.
//!
//!     cargo run --example wedge_metric

use gluedforms::metric::{glue_metric, gram_at, metrics_compatibility, PieceMetric};
use gluedforms::parse::parse_expr;
use gluedforms::scalar::rat;
use gluedforms::space::fixtures::{full_identification, wedge};
use gluedforms::space::{GluedPoint, Piece};

fn main() {
    let x = wedge();
    let g1 = PieceMetric::identity(Piece::P1, 2);
    let g2 = PieceMetric::identity(Piece::P2, 2);
    let c = metrics_compatibility(&x, &g1, &g2, 8, 0).unwrap();
    println!("wedge: metrics compatible = {}", c.compatible);
    let gm = glue_metric(&x, g1, g2).unwrap();
    for p in [
        GluedPoint::p1(vec![rat(0), rat(0)]),
        GluedPoint::p2(vec![rat(1), rat(-1)]),
    ] {
        let r = gram_at(&gm, &p).unwrap();
        println!(
            "  at {}: fibre dim {}, rank {}",
            r.point, r.fibre_dim, r.rank
        );
        for i in 0..r.gram.rows() {
            let row: Vec<String> = r.gram.row(i).iter().map(ToString::to_string).collect();
            println!("    [{}]", row.join(", "));
        }
    }

    let f = full_identification(1);
    let h = |piece| {
        PieceMetric::from_upper(piece, 1, vec![parse_expr("2 + x0^2", 1).unwrap()]).unwrap()
    };
    let gm = glue_metric(&f, h(Piece::P1), h(Piece::P2)).unwrap();
    println!("R glued to itself: metrics compatible = {}", gm.compatible);
    for t in [-1, 0, 2] {
        let r = gram_at(&gm, &GluedPoint::p1(vec![rat(t)])).unwrap();
        println!("  at t = {}: gram {}", t, r.gram.get(0, 0));
    }
}
