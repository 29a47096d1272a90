//! Every form on Y extends to a compatible pair on the two pieces.
//!
//!     cargo run --example extension_witness

use gluedforms::equal::EqualityOracle;
use gluedforms::forms::{
    check_compatible, extend_form_from_y, pull_through_f, restrict_to_y, PulledForm,
};
use gluedforms::parse::parse_form;
use gluedforms::space::fixtures::skew_plane;

fn main() {
    // Y is the plane z = 0 in R³, sent onto R² by (s, t) ↦ (s + t + 1, t − 2)
    let x = skew_plane();
    let oracle = EqualityOracle::default();
    let on_y = PulledForm::new(parse_form("x0*x1 dx0 + (x1^2 - 1) dx1", 2).unwrap());

    let (w1, w2) = extend_form_from_y(&x, &on_y).unwrap();
    println!("form on Y: {}", on_y);
    println!("w1 = {}", w1);
    println!("w2 = {}", w2);
    println!("i*w1   = {}", restrict_to_y(&x, &w1).unwrap());
    println!("f*j*w2 = {}", pull_through_f(&x, &w2).unwrap());
    println!(
        "compatible: {}",
        check_compatible(&x, &w1, &w2, &oracle).unwrap().compatible
    );
}
