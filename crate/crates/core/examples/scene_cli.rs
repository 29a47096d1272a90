//! Drive the command layer from an in-memory scene, as the binary does.
//!
//!     cargo run --example scene_cli

use gluedforms::cli::{run, Options};

const SCENE: &str = "
space X1 = R^2;
space X2 = R^2;
subset Y of X1 = param(t -> (0, t));
gluemap f : Y -> X2 = map(t -> (0, 2*t));
glued GX = glue(X1, X2, f);
form a on X1 = dx1;
form b on X2 = (1/2) dx1 + x0 dx0;
";

fn main() {
    let opts = Options::default();
    for (command, args) in [
        ("check-compat", "GX a b"),
        ("fibre", "GX at P2:(0,4)"),
        ("oracle", "GX at P2:(0,4) degree 2"),
    ] {
        let args: Vec<String> = args.split_whitespace().map(String::from).collect();
        match run(SCENE, command, &args, &opts) {
            Ok(report) => println!("{}", report.to_text()),
            Err(e) => eprintln!("{}: {}", command, e),
        }
    }
}
