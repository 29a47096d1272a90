//! Parse expressions, differentiate them and decide equality.
//!
//!     cargo run --example parse_and_differentiate

use gluedforms::equal::expr_equal;
use gluedforms::parse::parse_expr;
use gluedforms::scalar::ratio;

fn main() {
    let e = parse_expr("x0^2*x1 + sin(x0)*exp(x1) - 3/4*x1", 2).unwrap();
    println!("e        = {}", e);
    for i in 0..2 {
        println!("de/dx{}   = {}", i, e.differentiate(i));
    }

    let at = [ratio(1, 2), ratio(-1, 3)];
    println!("e(1/2, -1/3) = {}", e.eval_scalar(&at).unwrap());

    // polynomial identities are decided exactly, the rest by seeded sampling
    let a = parse_expr("(x0 + x1)^2", 2).unwrap();
    let b = parse_expr("x0^2 + 2*x0*x1 + x1^2", 2).unwrap();
    let eq = expr_equal(&a, &b, 2).unwrap();
    println!(
        "(x0 + x1)^2 == expanded: {} ({})",
        eq.equal,
        eq.mode.as_str()
    );

    let c = parse_expr("sin(x0)^2 + cos(x0)^2", 1).unwrap();
    let eq = expr_equal(&c, &parse_expr("1", 1).unwrap(), 1).unwrap();
    println!("sin^2 + cos^2 == 1: {} ({})", eq.equal, eq.mode.as_str());
}
